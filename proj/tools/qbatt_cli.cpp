// qbatt command-line front end. Talks to the library only through qbatt.h.

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qbatt/qbatt.h"

namespace {

struct ConfigDeleter {
    void operator()(qbatt_config* c) const { qbatt_config_free(c); }
};
struct SeriesDeleter {
    void operator()(qbatt_series* s) const { qbatt_series_free(s); }
};
struct ReportDeleter {
    void operator()(qbatt_report* r) const { qbatt_report_free(r); }
};
using ConfigPtr = std::unique_ptr<qbatt_config, ConfigDeleter>;
using SeriesPtr = std::unique_ptr<qbatt_series, SeriesDeleter>;
using ReportPtr = std::unique_ptr<qbatt_report, ReportDeleter>;

int exit_code(qbatt_status s)
{
    switch (s) {
    case QBATT_OK:
        return 0;
    case QBATT_ERR_VALIDATION:
        return 2;
    case QBATT_ERR_NUMERICAL:
        return 3;
    case QBATT_ERR_IO:
        return 4;
    default:
        return 1;
    }
}

struct Failure {
    qbatt_status status;
};

void check(qbatt_status s)
{
    if (s != QBATT_OK) {
        std::fprintf(stderr, "qbatt: %s: %s\n", qbatt_status_name(s), qbatt_last_error());
        throw Failure{s};
    }
}

struct Options {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::string> dt;
    std::optional<std::string> t_max;
    std::optional<std::string> eta2;
    std::optional<std::string> g;
    std::optional<std::string> nmax;
    std::optional<std::string> shots;
    std::optional<std::string> seed;
    std::optional<std::string> jobs;
    std::vector<std::string> set;
    bool full_secular = false;
    bool renormalize = false;
};

void add_common(CLI::App& cmd, Options& o)
{
    cmd.add_option("--config", o.config, "key = value configuration file");
    cmd.add_option("--out", o.out, "output directory (default: config 'output')");
    cmd.add_option("--dt", o.dt, "time step in 1/lambda");
    cmd.add_option("--t-max", o.t_max, "final lambda*t");
    cmd.add_option("--eta2", o.eta2, "reservoir coupling eta^2");
    cmd.add_option("--g", o.g, "charger-battery coupling");
    cmd.add_option("--nmax", o.nmax, "jump truncation level (0, 1 or 2)");
    cmd.add_option("--shots", o.shots, "circuit shots");
    cmd.add_option("--seed", o.seed, "circuit master seed");
    cmd.add_option("--jobs", o.jobs, "worker threads");
    cmd.add_option("--set", o.set, "extra key=value override (repeatable)");
    cmd.add_flag("--full-secular", o.full_secular, "include the gamma_+- channels");
    cmd.add_flag("--renormalize", o.renormalize, "divide reconstructed states by their weight");
}

ConfigPtr build_config(const Options& o)
{
    qbatt_config* raw = nullptr;
    check(o.config.empty() ? qbatt_config_new(&raw) : qbatt_config_load(o.config.c_str(), &raw));
    ConfigPtr cfg(raw);
    const auto apply = [&](const char* key, const std::optional<std::string>& v) {
        if (v) {
            check(qbatt_config_set(cfg.get(), key, v->c_str()));
        }
    };
    for (const auto& kv : o.set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "qbatt: --set expects key=value, got '%s'\n", kv.c_str());
            throw Failure{QBATT_ERR_VALIDATION};
        }
        check(qbatt_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }
    apply("dt", o.dt);
    apply("t_max", o.t_max);
    apply("eta2", o.eta2);
    apply("g", o.g);
    apply("nmax", o.nmax);
    apply("shots", o.shots);
    apply("seed", o.seed);
    apply("jobs", o.jobs);
    apply("output", o.out);
    if (o.full_secular) {
        check(qbatt_config_set(cfg.get(), "dissipator", "full_secular"));
    }
    if (o.renormalize) {
        check(qbatt_config_set(cfg.get(), "renormalize", "true"));
    }
    return cfg;
}

std::string output_dir(const qbatt_config* cfg)
{
    char buf[4096];
    check(qbatt_config_get(cfg, "output", buf, sizeof buf));
    std::error_code ec;
    std::filesystem::create_directories(buf, ec);
    if (ec) {
        std::fprintf(stderr, "qbatt: cannot create output directory '%s': %s\n", buf, ec.message().c_str());
        throw Failure{QBATT_ERR_IO};
    }
    return buf;
}

void write_series(const qbatt_series* s, const std::string& path)
{
    for (std::size_t i = 0; i < qbatt_series_warning_count(s); ++i) {
        std::fprintf(stderr, "qbatt: warning: %s\n", qbatt_series_warning(s, i));
    }
    check(qbatt_series_write_csv(s, path.c_str()));
    std::printf("%s\n", path.c_str());
}

int run_single(const std::string& command, const Options& o)
{
    ConfigPtr cfg = build_config(o);
    const std::filesystem::path dir = output_dir(cfg.get());
    qbatt_series* raw = nullptr;
    qbatt_series* shots_raw = nullptr;
    if (command == "rates") {
        check(qbatt_run_rates(cfg.get(), &raw));
    } else if (command == "evolve") {
        check(qbatt_run_evolve(cfg.get(), &raw));
    } else if (command == "nmqj") {
        check(qbatt_run_nmqj(cfg.get(), &raw));
    } else {
        check(qbatt_run_circuit(cfg.get(), &raw, &shots_raw));
    }
    SeriesPtr series(raw);
    SeriesPtr shots(shots_raw);
    write_series(series.get(), (dir / (command + ".csv")).string());
    if (shots) {
        write_series(shots.get(), (dir / (command + "_shots.csv")).string());
    }
    return 0;
}

int run_scenario(const std::string& name, const Options& o)
{
    ConfigPtr cfg = build_config(o);
    const std::filesystem::path dir = output_dir(cfg.get());
    qbatt_report* raw = nullptr;
    check(qbatt_run_scenario(cfg.get(), name.c_str(), dir.string().c_str(), &raw));
    ReportPtr report(raw);
    for (std::size_t i = 0; i < qbatt_report_warning_count(report.get()); ++i) {
        std::fprintf(stderr, "qbatt: warning: %s\n", qbatt_report_warning(report.get(), i));
    }
    for (std::size_t i = 0; i < qbatt_report_file_count(report.get()); ++i) {
        std::printf("%s\n", (dir / qbatt_report_file(report.get(), i)).string().c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Charger-mediated quantum battery under time-dependent dephasing"};
    app.require_subcommand(1);
    app.set_version_flag("--version", qbatt_version());

    Options opts;
    std::vector<std::pair<std::string, CLI::App*>> singles;
    for (const char* name : {"rates", "evolve", "nmqj", "circuit"}) {
        static const char* help[] = {"tabulate gamma_0, gamma_+-, and the coarse-grained rate",
                                     "RK4 integration of the master equation",
                                     "deterministic non-Markovian quantum-jump hierarchy",
                                     "stochastic circuit ensemble"};
        const std::size_t i = singles.size();
        CLI::App* cmd = app.add_subcommand(name, help[i]);
        add_common(*cmd, opts);
        singles.emplace_back(name, cmd);
    }
    std::string scenario_name;
    bool list = false;
    CLI::App* scenario = app.add_subcommand("scenario", "run a named multi-curve scenario");
    scenario->add_option("name", scenario_name, "scenario name");
    scenario->add_flag("--list", list, "print the scenario names");
    add_common(*scenario, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        for (const auto& [name, cmd] : singles) {
            if (cmd->parsed()) {
                return run_single(name, opts);
            }
        }
        if (list) {
            for (std::size_t i = 0; qbatt_scenario_name(i) != nullptr; ++i) {
                std::printf("%s\n", qbatt_scenario_name(i));
            }
            return 0;
        }
        if (scenario_name.empty()) {
            std::fprintf(stderr, "qbatt: scenario: a name is required (see --list)\n");
            return 2;
        }
        return run_scenario(scenario_name, opts);
    } catch (const Failure& f) {
        return exit_code(f.status);
    }
}
