#include "qbatt/circuit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "qbatt/error.hpp"
#include "qbatt/nmqj.hpp"

namespace qbatt {

void CircuitConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ValidationError("CircuitConfig: dt must be > 0");
    }
    if (!(t_max > 0.0)) {
        throw ValidationError("CircuitConfig: t_max must be > 0");
    }
    if (shots < 1) {
        throw ValidationError("CircuitConfig: shots must be >= 1");
    }
    if (record_stride < 1) {
        throw ValidationError("CircuitConfig: record_stride must be >= 1");
    }
    if (jobs < 1) {
        throw ValidationError("CircuitConfig: jobs must be >= 1");
    }
}

std::size_t CircuitConfig::cycles() const { return static_cast<std::size_t>(std::llround(t_max / dt)); }

ShotStream::ShotStream(std::uint64_t seed, std::uint64_t shot)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(shot), static_cast<std::uint32_t>(shot >> 32)};
    engine_.seed(seq);
}

double ShotStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

void check_jump_probabilities(const RateSchedule& schedule, std::size_t cycles)
{
    for (std::size_t k = 0; k < cycles; ++k) {
        const double prob = schedule.gamma0(k) * schedule.dt();
        if (prob >= 1.0) {
            throw ValidationError("circuit: jump probability gamma0*dt = " + to_text(prob) +
                                  " >= 1 at cycle " + std::to_string(k) + " (lambda*t = " +
                                  to_text(schedule.time(k)) + ")");
        }
    }
}

ShotRecord run_shot(const StateVector4& psi0, const CircuitConfig& cfg, const RateSchedule& schedule,
                    const std::vector<ComplexMatrix>& propagators, std::size_t shot,
                    std::vector<StateVector4>* trajectory)
{
    const std::size_t cycles = cfg.cycles();
    if (propagators.size() < cycles || schedule.size() < cycles) {
        throw ValidationError("run_shot: propagator table or schedule shorter than the run");
    }
    const ComplexMatrix flip = on_charger(pauli::x());
    ShotStream stream(cfg.seed, shot);
    ShotRecord rec;
    rec.shot = shot;
    StateVector4 psi = psi0.normalized();
    if (trajectory != nullptr) {
        trajectory->clear();
        trajectory->reserve(cycles);
    }
    for (std::size_t k = 0; k < cycles; ++k) {
        const double gamma0 = schedule.gamma0(k);
        // Suspended while the rate is negative: no draw, no flip.
        if (gamma0 > 0.0 && stream.uniform() < gamma0 * cfg.dt) {
            psi = flip * psi;
            rec.jump_cycles.push_back(k);
            rec.jump_times.push_back(schedule.time(k));
        }
        psi = propagators[k] * psi;
        if (trajectory != nullptr) {
            trajectory->push_back(psi);
        }
    }
    rec.final_state = psi;
    return rec;
}

namespace {

struct BatchSums {
    std::vector<ComplexMatrix> rho;       // per record
    std::vector<std::array<double, 3>> jumps; // shots with exactly 0, 1, 2 jumps, per record
    std::size_t shots = 0;
};

double sample_se(const std::vector<double>& v)
{
    if (v.size() < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double mean = 0.0;
    for (double x : v) {
        mean += x;
    }
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    const double n = static_cast<double>(v.size());
    return std::sqrt(ss / (n - 1.0) / n);
}

} // namespace

EnsembleResult run_ensemble(const StateVector4& psi0, const SystemParams& params, const CircuitConfig& cfg,
                            const RateSchedule& schedule)
{
    cfg.validate();
    params.validate();
    params.check_resonant();
    const std::size_t cycles = cfg.cycles();
    if (std::abs(schedule.dt() - cfg.dt) > 1e-15 * cfg.dt) {
        throw ValidationError("run_ensemble: schedule grid spacing differs from the cycle time");
    }
    if (schedule.size() < cycles + 1) {
        throw ValidationError("run_ensemble: schedule shorter than t_max");
    }
    check_jump_probabilities(schedule, cycles);
    const std::vector<ComplexMatrix> propagators =
        step_propagators(cycles, cfg.dt, params, cfg.propagator, cfg.frame);

    // Record after cycle index c means time (c + 1) dt; index 0 is the initial state.
    std::vector<std::size_t> record_times{0};
    for (std::size_t k = 1; k <= cycles; ++k) {
        if (k % static_cast<std::size_t>(cfg.record_stride) == 0 || k == cycles) {
            record_times.push_back(k);
        }
    }
    const std::size_t nrec = record_times.size();
    const std::size_t nbatch = std::min(kEnsembleBatches, cfg.shots);

    std::vector<BatchSums> batches(nbatch);
    EnsembleResult result;
    result.shots.resize(cfg.shots);
    const StateVector4 start = psi0.normalized();
    const ComplexMatrix rho_start = outer(start, start);

    std::atomic<std::size_t> next_batch{0};
    const auto worker = [&]() {
        std::vector<StateVector4> trajectory;
        for (std::size_t b = next_batch++; b < nbatch; b = next_batch++) {
            BatchSums& sums = batches[b];
            sums.rho.assign(nrec, ComplexMatrix::zero(4));
            sums.jumps.assign(nrec, {0.0, 0.0, 0.0});
            const std::size_t first = b * cfg.shots / nbatch;
            const std::size_t last = (b + 1) * cfg.shots / nbatch;
            sums.shots = last - first;
            for (std::size_t shot = first; shot < last; ++shot) {
                ShotRecord rec = run_shot(start, cfg, schedule, propagators, shot, &trajectory);
                std::size_t seen = 0;
                for (std::size_t r = 0; r < nrec; ++r) {
                    const std::size_t k = record_times[r];
                    sums.rho[r] += k == 0 ? rho_start : outer(trajectory[k - 1], trajectory[k - 1]);
                    while (seen < rec.jump_cycles.size() && rec.jump_cycles[seen] < k) {
                        ++seen;
                    }
                    if (seen < 3) {
                        sums.jumps[r][seen] += 1.0;
                    }
                }
                result.shots[shot] = std::move(rec);
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(nbatch)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    const double total = static_cast<double>(cfg.shots);
    result.energy_se.resize(nrec);
    result.ergotropy_se.resize(nrec);
    result.concurrence_se.resize(nrec);
    for (std::size_t r = 0; r < nrec; ++r) {
        ComplexMatrix rho = ComplexMatrix::zero(4);
        std::array<double, 3> counts{0.0, 0.0, 0.0};
        std::vector<double> energies;
        std::vector<double> ergotropies;
        std::vector<double> concurrences;
        for (const BatchSums& sums : batches) {
            rho += sums.rho[r];
            for (int j = 0; j < 3; ++j) {
                counts[j] += sums.jumps[r][j];
            }
            const DensityMatrix4 batch_rho =
                DensityMatrix4::from_matrix(hermitian_part(sums.rho[r] * cplx(1.0 / static_cast<double>(sums.shots))));
            energies.push_back(energy(batch_rho, 1.0));
            ergotropies.push_back(ergotropy(batch_rho, 1.0));
            concurrences.push_back(concurrence(batch_rho));
        }
        const DensityMatrix4 mean = DensityMatrix4::from_matrix(hermitian_part(rho * cplx(1.0 / total)));
        const std::size_t k = record_times[r];
        ObservableRow row = observe(mean, schedule.time(k), schedule.gamma0(k));
        row.K0 = counts[0] / total;
        row.K1_sum = counts[1] / total;
        row.K2_sum = counts[2] / total;
        row.K_total = row.K0 + row.K1_sum + row.K2_sum;
        result.series.rows.push_back(row);
        result.states.push_back(mean);
        result.energy_se[r] = sample_se(energies);
        result.ergotropy_se[r] = sample_se(ergotropies);
        result.concurrence_se[r] = sample_se(concurrences);
    }
    return result;
}

EnsembleResult run_ensemble(const StateVector4& psi0, const SystemParams& params, const CircuitConfig& cfg)
{
    cfg.validate();
    return run_ensemble(psi0, params, cfg, RateSchedule::build(params, cfg.t_max, cfg.dt));
}

Table EnsembleResult::to_table() const
{
    Table t = series.to_table();
    t.columns.insert(t.columns.end(), {"energy_se", "ergotropy_se", "concurrence_se"});
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        t.rows[r].insert(t.rows[r].end(), {energy_se[r], ergotropy_se[r], concurrence_se[r]});
    }
    return t;
}

Table EnsembleResult::shot_summary() const
{
    Table t;
    t.columns = {"shot", "jump_count", "first_jump_time"};
    for (const auto& rec : shots) {
        const double first =
            rec.jump_times.empty() ? std::numeric_limits<double>::quiet_NaN() : rec.jump_times.front();
        t.rows.push_back({static_cast<double>(rec.shot), static_cast<double>(rec.jump_count()), first});
    }
    return t;
}

namespace {

ObservableSeries continue_nmqj(const DensityMatrix4& rho, const SystemParams& params, double t_switch, double t_max,
                               const ContinuationConfig& cfg)
{
    // Each eigenvector of the temporal state starts its own hierarchy.
    const HermitianEigen e = hermitian_eigen(rho.matrix());
    std::vector<TrajectoryHierarchy> parts;
    std::vector<double> probs;
    for (int i = 0; i < 4; ++i) {
        if (e.values[i] <= 1e-14) {
            continue;
        }
        StateVector4 v(e.vectors(0, i), e.vectors(1, i), e.vectors(2, i), e.vectors(3, i));
        parts.emplace_back(v, cfg.n_max);
        probs.push_back(e.values[i]);
    }
    const std::size_t steps = static_cast<std::size_t>(std::llround((t_max - t_switch) / cfg.dt));
    ObservableSeries series;
    const auto record = [&](std::size_t k) {
        const double t = t_switch + static_cast<double>(k) * cfg.dt;
        ComplexMatrix mix = ComplexMatrix::zero(4);
        ObservableRow weights;
        for (std::size_t j = 0; j < parts.size(); ++j) {
            mix += parts[j].reconstruct().matrix() * cplx(probs[j]);
            weights.K0 += probs[j] * parts[j].K0();
            weights.K1_sum += probs[j] * parts[j].K1_sum();
            weights.K2_sum += probs[j] * parts[j].K2_sum();
        }
        ObservableRow row = observe(DensityMatrix4::from_matrix(hermitian_part(mix)), t, gamma0_of_t(params, t));
        row.K0 = weights.K0;
        row.K1_sum = weights.K1_sum;
        row.K2_sum = weights.K2_sum;
        row.K_total = row.K0 + row.K1_sum + row.K2_sum;
        series.rows.push_back(row);
    };
    record(0);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = t_switch + static_cast<double>(k) * cfg.dt;
        const double gamma0 = gamma0_of_t(params, t);
        const ComplexMatrix U = step_propagator(t, cfg.dt, params);
        for (auto& h : parts) {
            if (rate_sign(gamma0) > 0) {
                h.step_positive(k, std::max(gamma0, 0.0), cfg.dt, U);
            } else {
                h.step_negative(gamma0, cfg.dt, U);
            }
        }
        if ((k + 1) % static_cast<std::size_t>(cfg.record_stride) == 0 || k + 1 == steps) {
            record(k + 1);
        }
    }
    return series;
}

} // namespace

ObservableSeries continue_from_temporal_state(const DensityMatrix4& rho, const SystemParams& params, double t_switch,
                                              double t_max, const ContinuationConfig& cfg)
{
    params.validate();
    if (rate_sign(gamma0_of_t(params, t_switch)) < 0) {
        throw ValidationError("continue_from_temporal_state: t_switch = " + to_text(t_switch) +
                              " lies inside a negative-rate segment");
    }
    if (!(t_max > t_switch)) {
        throw ValidationError("continue_from_temporal_state: t_max must exceed t_switch");
    }
    if (cfg.record_stride < 1 || !(cfg.dt > 0.0)) {
        throw ValidationError("continue_from_temporal_state: need dt > 0 and record_stride >= 1");
    }
    if (cfg.mode == ContinuationMode::nmqj) {
        return continue_nmqj(rho, params, t_switch, t_max, cfg);
    }
    EvolutionConfig ec;
    ec.dt = cfg.dt;
    ec.t_start = t_switch;
    ec.t_max = t_max;
    ec.mode = EvolutionMode::non_markovian;
    ec.record_stride = cfg.record_stride;
    return evolve(rho, ec, params).series;
}

} // namespace qbatt
