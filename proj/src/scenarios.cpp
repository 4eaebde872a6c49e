#include "qbatt/scenarios.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <thread>

#include "qbatt/circuit.hpp"
#include "qbatt/error.hpp"
#include "qbatt/integrator.hpp"
#include "qbatt/nmqj.hpp"

namespace qbatt {

namespace {

void require_sound(const ObservableSeries& series, const std::string& what)
{
    const auto problems = series.violations();
    if (!problems.empty()) {
        throw NumericalError(what + ": " + problems.front() + " (" + std::to_string(problems.size()) +
                             " violations)");
    }
}

HeaderLines header_for(const RunConfig& cfg, const std::string& run, const std::string& curve = {})
{
    HeaderLines h{{"run", run}};
    if (!curve.empty()) {
        h.emplace_back("curve", curve);
    }
    // Where and how many threads do not change the numbers.
    for (auto& kv : cfg.resolved()) {
        if (kv.first != "jobs" && kv.first != "output") {
            h.push_back(std::move(kv));
        }
    }
    return h;
}

// Applies scenario defaults to the keys the user left alone.
RunConfig with_defaults(const RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& defaults)
{
    RunConfig out = cfg;
    for (const auto& [key, value] : defaults) {
        if (!cfg.is_set(key)) {
            out.set(key, value);
        }
    }
    out.explicit_keys = cfg.explicit_keys;
    out.validate();
    return out;
}

RunConfig with_values(const RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& values)
{
    RunConfig out = cfg;
    for (const auto& [key, value] : values) {
        out.set(key, value);
    }
    out.explicit_keys = cfg.explicit_keys;
    out.validate();
    return out;
}

// RK4 on a grid fine enough for the drive phase whose recorded times land on
// the grid of `dt`.
RunOutput reference_rk4(const RunConfig& cfg, double dt, int stride)
{
    const double rate = h1_phase_rate(cfg.params, cfg.frame);
    const auto sub = static_cast<int>(std::max(1.0, std::ceil(dt * rate / (0.5 * EvolutionConfig::kMaxPhasePerStep))));
    RunConfig rk = cfg;
    rk.dt = dt / sub;
    rk.record_stride = stride * sub;
    rk.mode = EvolutionMode::non_markovian;
    return run_evolve(rk);
}

std::vector<double> dt_sweep(const RunConfig& cfg, const std::vector<double>& defaults)
{
    return cfg.is_set("dt") ? std::vector<double>{cfg.dt} : defaults;
}

struct Job {
    std::string file;
    std::function<RunOutput()> run;
};

ScenarioReport run_jobs(const std::vector<Job>& jobs, unsigned workers, const std::string& out_dir)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
    }
    std::vector<RunOutput> outputs(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                outputs[i] = jobs[i].run();
                write_csv_file((std::filesystem::path(out_dir) / jobs[i].file).string(), outputs[i].table,
                               outputs[i].header);
                if (outputs[i].shots) {
                    const std::string stem = std::filesystem::path(jobs[i].file).stem().string();
                    write_csv_file((std::filesystem::path(out_dir) / (stem + "_shots.csv")).string(),
                                   *outputs[i].shots, outputs[i].header);
                }
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    ScenarioReport report;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        report.files.push_back(jobs[i].file);
        if (outputs[i].shots) {
            report.files.push_back(std::filesystem::path(jobs[i].file).stem().string() + "_shots.csv");
        }
        for (const auto& w : outputs[i].warnings) {
            report.warnings.push_back(jobs[i].file + ": " + w);
        }
    }
    return report;
}

std::string label(double v) { return format_number(v); }

std::vector<Job> fig2_rates(const RunConfig& base)
{
    const RunConfig cfg = with_defaults(base, {{"dt", "1e-3"}, {"t_max", "4"}});
    return {{"fig2_rates.csv", [cfg] {
                 RunOutput out = run_rates(cfg);
                 out.header.insert(out.header.begin(), {"scenario", "fig2_rates"});
                 return out;
             }}};
}

std::vector<Job> fig2_concurrence(const RunConfig& base)
{
    const RunConfig cfg =
        with_defaults(base, {{"g", "0"}, {"initial_state", "bell"}, {"t_max", "4"}, {"record_stride", "10"}});
    std::vector<Job> jobs;
    for (const char* mode : {"non_markovian", "markovian_asymptotic"}) {
        const RunConfig c = with_values(cfg, {{"mode", mode}});
        jobs.push_back({std::string("fig2_concurrence_") + mode + ".csv", [c] {
                            RunOutput out = run_evolve(c);
                            out.header.insert(out.header.begin(), {"scenario", "fig2_concurrence"});
                            return out;
                        }});
    }
    return jobs;
}

std::vector<Job> fig3_ergotropy(const RunConfig& base)
{
    const RunConfig cfg = with_defaults(base, {{"t_max", "2"}, {"initial_state", "up_y,down_z"}});
    const std::vector<double> panels =
        cfg.is_set("eta2") ? std::vector<double>{cfg.params.eta_sq} : std::vector<double>{0.5, 1.0, 2.0, 3.0};
    const std::vector<std::pair<std::string, std::string>> cases{
        {"case_i", "non_markovian"}, {"case_ii", "markovian_asymptotic"}, {"case_iii", "unitary"}};
    std::vector<Job> jobs;
    for (double eta2 : panels) {
        for (const auto& [name, mode] : cases) {
            const RunConfig c = with_values(cfg, {{"eta2", label(eta2)}, {"mode", mode}});
            jobs.push_back({"fig3_ergotropy_eta2_" + label(eta2) + "_" + name + ".csv", [c] {
                                RunOutput out = run_evolve(c);
                                out.header.insert(out.header.begin(), {"scenario", "fig3_ergotropy"});
                                return out;
                            }});
        }
    }
    return jobs;
}

std::vector<Job> fig4_weights(const RunConfig& base)
{
    const RunConfig cfg = with_defaults(
        base, {{"dt", "5e-4"}, {"t_max", "1.2"}, {"renormalize", "true"}, {"initial_state", "up_y,down_z"}});
    const std::vector<int> levels = cfg.is_set("nmax") ? std::vector<int>{cfg.n_max} : std::vector<int>{0, 1, 2};
    std::vector<Job> jobs;
    for (int n : levels) {
        const RunConfig c = with_values(cfg, {{"nmax", std::to_string(n)}});
        jobs.push_back({"fig4_weights_nmax_" + std::to_string(n) + ".csv", [c] {
                            RunOutput out = run_nmqj_command(c);
                            out.header.insert(out.header.begin(), {"scenario", "fig4_weights"});
                            return out;
                        }});
    }
    jobs.push_back({"fig4_weights_rk4.csv", [cfg] {
                        RunOutput out = reference_rk4(cfg, cfg.dt, cfg.record_stride);
                        out.header.insert(out.header.begin(), {"scenario", "fig4_weights"});
                        return out;
                    }});
    return jobs;
}

std::vector<Job> fig5_earlystage(const RunConfig& base)
{
    const RunConfig cfg = with_defaults(base, {{"g", "0.2"}, {"t_max", "1.2"}, {"initial_state", "up_y,down_z"}});
    std::vector<Job> jobs;
    for (double dt : dt_sweep(cfg, {2e-4, 5e-4, 1e-3})) {
        const RunConfig c = with_values(cfg, {{"dt", label(dt)}});
        jobs.push_back({"fig5_earlystage_dt_" + label(dt) + ".csv", [c] {
                            RunOutput out = run_nmqj_command(c);
                            out.header.insert(out.header.begin(), {"scenario", "fig5_earlystage"});
                            return out;
                        }});
    }
    jobs.push_back({"fig5_earlystage_rk4.csv", [cfg] {
                        RunOutput out = reference_rk4(cfg, 2e-4, 1);
                        out.header.insert(out.header.begin(), {"scenario", "fig5_earlystage"});
                        return out;
                    }});
    jobs.push_back({"fig5_earlystage_circuit.csv", [cfg] {
                        RunOutput out = run_circuit_command(cfg);
                        out.header.insert(out.header.begin(), {"scenario", "fig5_earlystage"});
                        return out;
                    }});
    return jobs;
}

std::vector<Job> fig5_longtime(const RunConfig& base)
{
    const RunConfig cfg = with_defaults(base, {{"g", "0.2"}, {"t_max", "10"}, {"initial_state", "up_y,down_z"}});
    const int stride = cfg.is_set("record_stride") ? cfg.record_stride : 50;
    std::vector<Job> jobs;
    for (double dt : dt_sweep(cfg, {2e-4, 5e-4, 1e-3})) {
        jobs.push_back({"fig5_longtime_dt_" + label(dt) + ".csv", [cfg, dt, stride] {
                            const double t_switch =
                                cfg.t_switch ? *cfg.t_switch : end_of_negative_segment(cfg.params, dt);
                            RunConfig history = with_values(cfg, {{"dt", label(dt)}, {"renormalize", "true"}});
                            history.t_max = t_switch;
                            history.record_stride = 1;
                            const NmqjResult early = run_nmqj(history.initial_ket(), history.params, history.nmqj());
                            ContinuationConfig cc;
                            cc.record_stride = stride;
                            const ObservableSeries tail = continue_from_temporal_state(
                                early.states.back(), cfg.params, t_switch, cfg.t_max, cc);
                            require_sound(tail, "fig5_longtime continuation");
                            RunOutput out;
                            out.table = tail.to_table();
                            out.header = header_for(cfg, "continuation", "history dt = " + label(dt));
                            out.header.insert(out.header.begin(), {"scenario", "fig5_longtime"});
                            out.header.emplace_back("history_dt", label(dt));
                            out.header.emplace_back("t_switch_resolved", label(t_switch));
                            out.warnings = early.warnings;
                            return out;
                        }});
    }
    jobs.push_back({"fig5_longtime_rk4.csv", [cfg, stride] {
                        RunOutput out = reference_rk4(cfg, 2e-4, stride);
                        out.header.insert(out.header.begin(), {"scenario", "fig5_longtime"});
                        return out;
                    }});
    return jobs;
}

} // namespace

double end_of_negative_segment(const SystemParams& params, double dt, double t_limit)
{
    const RateSchedule schedule = RateSchedule::build(params, t_limit, dt);
    const auto negative = schedule.negative_segments();
    if (negative.empty()) {
        throw ValidationError("no negative-rate segment before lambda*t = " + format_number(t_limit));
    }
    return schedule.time(negative.front().end);
}

RunOutput run_rates(const RunConfig& cfg)
{
    cfg.validate();
    const RateSchedule schedule = RateSchedule::build(cfg.params, cfg.t_max, cfg.dt, true);
    RunOutput out;
    out.table.columns = {"lambda_t", "gamma0", "gamma_plus", "gamma_minus", "gamma0_coarse"};
    for (std::size_t k = 0; k < schedule.size(); k += static_cast<std::size_t>(cfg.record_stride)) {
        const double t = schedule.time(k);
        out.table.rows.push_back({t, schedule.gamma0(k), schedule.gamma_plus(k), schedule.gamma_minus(k),
                                  coarse_grained_gamma0(cfg.params, t, t)});
    }
    std::vector<std::string> warnings;
    cfg.params.check_secular(&warnings);
    out.warnings = warnings;
    out.header = header_for(cfg, "rates");
    return out;
}

RunOutput run_evolve(const RunConfig& cfg)
{
    cfg.validate();
    const EvolutionResult r = evolve(DensityMatrix4::from_pure(cfg.initial_ket()), cfg.evolution(), cfg.params);
    require_sound(r.series, "evolve");
    RunOutput out;
    out.table = r.series.to_table();
    out.warnings = r.diagnostics.warnings;
    out.header = header_for(cfg, "evolve");
    out.header.emplace_back("max_trace_dev", format_number(r.diagnostics.max_trace_dev));
    out.header.emplace_back("min_eigenvalue", format_number(r.diagnostics.min_eigenvalue));
    return out;
}

RunOutput run_nmqj_command(const RunConfig& cfg)
{
    cfg.validate();
    const NmqjResult r = run_nmqj(cfg.initial_ket(), cfg.params, cfg.nmqj());
    require_sound(r.series, "nmqj");
    RunOutput out;
    out.table = r.series.to_table();
    out.warnings = r.warnings;
    out.header = header_for(cfg, "nmqj");
    out.header.emplace_back("clamp_total", format_number(r.clamp_total));
    out.header.emplace_back("discarded_total", format_number(r.discarded_total));
    return out;
}

RunOutput run_circuit_command(const RunConfig& cfg)
{
    cfg.validate();
    const EnsembleResult r = run_ensemble(cfg.initial_ket(), cfg.params, cfg.circuit());
    require_sound(r.series, "circuit");
    RunOutput out;
    out.table = r.to_table();
    out.shots = r.shot_summary();
    out.header = header_for(cfg, "circuit");
    return out;
}

const std::vector<std::string>& scenario_names()
{
    static const std::vector<std::string> names{"fig2_rates",     "fig2_concurrence", "fig3_ergotropy",
                                                "fig4_weights",   "fig5_earlystage",  "fig5_longtime"};
    return names;
}

ScenarioReport run_scenario(const std::string& name, const RunConfig& cfg, const std::string& out_dir)
{
    cfg.validate();
    std::vector<Job> jobs;
    if (name == "fig2_rates") {
        jobs = fig2_rates(cfg);
    } else if (name == "fig2_concurrence") {
        jobs = fig2_concurrence(cfg);
    } else if (name == "fig3_ergotropy") {
        jobs = fig3_ergotropy(cfg);
    } else if (name == "fig4_weights") {
        jobs = fig4_weights(cfg);
    } else if (name == "fig5_earlystage") {
        jobs = fig5_earlystage(cfg);
    } else if (name == "fig5_longtime") {
        jobs = fig5_longtime(cfg);
    } else {
        std::string valid;
        for (const auto& n : scenario_names()) {
            valid += (valid.empty() ? "" : ", ") + n;
        }
        throw ValidationError("unknown scenario '" + name + "'; valid names: " + valid);
    }
    return run_jobs(jobs, cfg.jobs, out_dir);
}

} // namespace qbatt
