#include "qbatt/qbatt.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>

#include "qbatt/config.hpp"
#include "qbatt/csv.hpp"
#include "qbatt/error.hpp"
#include "qbatt/scenarios.hpp"

struct qbatt_config {
    qbatt::RunConfig cfg;
};

struct qbatt_series {
    qbatt::RunOutput out;
};

struct qbatt_report {
    qbatt::ScenarioReport report;
};

namespace {

thread_local std::string last_error;

qbatt_status fail(qbatt_status status, const std::string& message)
{
    last_error = message;
    return status;
}

// Runs f, translating exceptions into status codes.
template <class F>
qbatt_status guarded(F&& f)
{
    try {
        f();
        last_error.clear();
        return QBATT_OK;
    } catch (const qbatt::ValidationError& e) {
        return fail(QBATT_ERR_VALIDATION, e.what());
    } catch (const qbatt::NumericalError& e) {
        return fail(QBATT_ERR_NUMERICAL, e.what());
    } catch (const qbatt::IoError& e) {
        return fail(QBATT_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(QBATT_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(QBATT_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(QBATT_ERR_INTERNAL, "unknown error");
    }
}

qbatt_status null_argument(const char* fn) { return fail(QBATT_ERR_INVALID_ARGUMENT, std::string(fn) + ": null argument"); }

template <class Run>
qbatt_status run_series(const qbatt_config* cfg, qbatt_series** out, Run run, const char* fn)
{
    if (cfg == nullptr || out == nullptr) {
        return null_argument(fn);
    }
    *out = nullptr;
    return guarded([&] { *out = new qbatt_series{run(cfg->cfg)}; });
}

} // namespace

extern "C" {

const char* qbatt_version(void) { return "0.1.0"; }

const char* qbatt_last_error(void) { return last_error.c_str(); }

const char* qbatt_status_name(qbatt_status status)
{
    switch (status) {
    case QBATT_OK:
        return "ok";
    case QBATT_ERR_INVALID_ARGUMENT:
        return "invalid argument";
    case QBATT_ERR_VALIDATION:
        return "validation error";
    case QBATT_ERR_NUMERICAL:
        return "numerical error";
    case QBATT_ERR_IO:
        return "i/o error";
    case QBATT_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

qbatt_status qbatt_config_new(qbatt_config** out)
{
    if (out == nullptr) {
        return null_argument("qbatt_config_new");
    }
    *out = nullptr;
    return guarded([&] { *out = new qbatt_config{}; });
}

qbatt_status qbatt_config_parse(const char* text, qbatt_config** out)
{
    if (text == nullptr || out == nullptr) {
        return null_argument("qbatt_config_parse");
    }
    *out = nullptr;
    return guarded([&] { *out = new qbatt_config{qbatt::parse_config(text)}; });
}

qbatt_status qbatt_config_load(const char* path, qbatt_config** out)
{
    if (path == nullptr || out == nullptr) {
        return null_argument("qbatt_config_load");
    }
    *out = nullptr;
    return guarded([&] { *out = new qbatt_config{qbatt::load_config(path)}; });
}

qbatt_status qbatt_config_set(qbatt_config* cfg, const char* key, const char* value)
{
    if (cfg == nullptr || key == nullptr || value == nullptr) {
        return null_argument("qbatt_config_set");
    }
    return guarded([&] {
        qbatt::RunConfig updated = cfg->cfg;
        updated.set(key, value);
        updated.validate();
        cfg->cfg = std::move(updated);
    });
}

qbatt_status qbatt_config_get(const qbatt_config* cfg, const char* key, char* buf, size_t len)
{
    if (cfg == nullptr || key == nullptr || buf == nullptr || len == 0) {
        return null_argument("qbatt_config_get");
    }
    for (const auto& [k, v] : cfg->cfg.resolved()) {
        if (k == key) {
            if (v.size() >= len) {
                buf[0] = '\0';
                return fail(QBATT_ERR_INVALID_ARGUMENT, "qbatt_config_get: value of '" + k + "' needs " +
                                                            std::to_string(v.size() + 1) + " bytes");
            }
            std::memcpy(buf, v.data(), v.size());
            buf[v.size()] = '\0';
            last_error.clear();
            return QBATT_OK;
        }
    }
    return fail(QBATT_ERR_VALIDATION, std::string("'") + key + "' is not a known configuration key");
}

void qbatt_config_free(qbatt_config* cfg) { delete cfg; }

qbatt_status qbatt_run_rates(const qbatt_config* cfg, qbatt_series** out)
{
    return run_series(cfg, out, qbatt::run_rates, "qbatt_run_rates");
}

qbatt_status qbatt_run_evolve(const qbatt_config* cfg, qbatt_series** out)
{
    return run_series(cfg, out, qbatt::run_evolve, "qbatt_run_evolve");
}

qbatt_status qbatt_run_nmqj(const qbatt_config* cfg, qbatt_series** out)
{
    return run_series(cfg, out, qbatt::run_nmqj_command, "qbatt_run_nmqj");
}

qbatt_status qbatt_run_circuit(const qbatt_config* cfg, qbatt_series** out, qbatt_series** shots)
{
    if (cfg == nullptr || out == nullptr) {
        return null_argument("qbatt_run_circuit");
    }
    *out = nullptr;
    if (shots != nullptr) {
        *shots = nullptr;
    }
    return guarded([&] {
        qbatt::RunOutput r = qbatt::run_circuit_command(cfg->cfg);
        if (shots != nullptr) {
            qbatt::RunOutput s;
            s.table = std::move(*r.shots);
            s.header = r.header;
            *shots = new qbatt_series{std::move(s)};
        }
        r.shots.reset();
        *out = new qbatt_series{std::move(r)};
    });
}

size_t qbatt_series_rows(const qbatt_series* s) { return s ? s->out.table.rows.size() : 0; }

size_t qbatt_series_cols(const qbatt_series* s) { return s ? s->out.table.columns.size() : 0; }

const char* qbatt_series_column_name(const qbatt_series* s, size_t col)
{
    if (s == nullptr || col >= s->out.table.columns.size()) {
        return nullptr;
    }
    return s->out.table.columns[col].c_str();
}

double qbatt_series_value(const qbatt_series* s, size_t row, size_t col)
{
    if (s == nullptr || row >= s->out.table.rows.size() || col >= s->out.table.rows[row].size()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return s->out.table.rows[row][col];
}

size_t qbatt_series_warning_count(const qbatt_series* s) { return s ? s->out.warnings.size() : 0; }

const char* qbatt_series_warning(const qbatt_series* s, size_t i)
{
    if (s == nullptr || i >= s->out.warnings.size()) {
        return nullptr;
    }
    return s->out.warnings[i].c_str();
}

qbatt_status qbatt_series_write_csv(const qbatt_series* s, const char* path)
{
    if (s == nullptr || path == nullptr) {
        return null_argument("qbatt_series_write_csv");
    }
    return guarded([&] { qbatt::write_csv_file(path, s->out.table, s->out.header); });
}

void qbatt_series_free(qbatt_series* s) { delete s; }

const char* qbatt_scenario_name(size_t i)
{
    const auto& names = qbatt::scenario_names();
    return i < names.size() ? names[i].c_str() : nullptr;
}

qbatt_status qbatt_run_scenario(const qbatt_config* cfg, const char* name, const char* out_dir, qbatt_report** out)
{
    if (cfg == nullptr || name == nullptr || out_dir == nullptr || out == nullptr) {
        return null_argument("qbatt_run_scenario");
    }
    *out = nullptr;
    return guarded([&] { *out = new qbatt_report{qbatt::run_scenario(name, cfg->cfg, out_dir)}; });
}

size_t qbatt_report_file_count(const qbatt_report* r) { return r ? r->report.files.size() : 0; }

const char* qbatt_report_file(const qbatt_report* r, size_t i)
{
    if (r == nullptr || i >= r->report.files.size()) {
        return nullptr;
    }
    return r->report.files[i].c_str();
}

size_t qbatt_report_warning_count(const qbatt_report* r) { return r ? r->report.warnings.size() : 0; }

const char* qbatt_report_warning(const qbatt_report* r, size_t i)
{
    if (r == nullptr || i >= r->report.warnings.size()) {
        return nullptr;
    }
    return r->report.warnings[i].c_str();
}

void qbatt_report_free(qbatt_report* r) { delete r; }

} // extern "C"
