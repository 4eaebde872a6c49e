// circuit.hpp: stochastic circuit: per-cycle global unitaries with random sx
// flips on the charger, suspended while gamma_0 < 0, averaged over shots.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qbatt/integrator.hpp"
#include "qbatt/model.hpp"
#include "qbatt/observables.hpp"
#include "qbatt/qmath.hpp"
#include "qbatt/table.hpp"

namespace qbatt {

struct CircuitConfig {
    double dt = 1e-3; // cycle time
    std::size_t shots = 1000;
    std::uint64_t seed = 1;
    double t_max = 1.2;
    int record_stride = 1;
    PropagatorKind propagator = PropagatorKind::midpoint;
    Frame frame = Frame::rotating;
    unsigned jobs = 1;

    void validate() const;
    std::size_t cycles() const;
};

// Independent uniform stream for one shot, a pure function of (seed, shot).
class ShotStream {
public:
    ShotStream(std::uint64_t seed, std::uint64_t shot);
    double uniform(); // [0, 1), 53 random bits

private:
    std::mt19937_64 engine_;
};

struct ShotRecord {
    std::size_t shot = 0;
    std::vector<std::size_t> jump_cycles;
    std::vector<double> jump_times;
    StateVector4 final_state;

    std::size_t jump_count() const { return jump_times.size(); }
};

// Throws ValidationError naming the first cycle whose gamma_0 dt >= 1.
void check_jump_probabilities(const RateSchedule& schedule, std::size_t cycles);

// One shot. propagators[k] is the unitary of cycle k. If trajectory is
// non-null it receives the state after every cycle (cycles entries).
ShotRecord run_shot(const StateVector4& psi0, const CircuitConfig& cfg, const RateSchedule& schedule,
                    const std::vector<ComplexMatrix>& propagators, std::size_t shot,
                    std::vector<StateVector4>* trajectory = nullptr);

struct EnsembleResult {
    std::vector<DensityMatrix4> states; // shot-averaged, one per series row
    ObservableSeries series;            // K columns: fraction of shots with 0, 1, 2 jumps
    std::vector<double> energy_se;
    std::vector<double> ergotropy_se;
    std::vector<double> concurrence_se;
    std::vector<ShotRecord> shots;

    // Series columns followed by the three standard-error columns.
    Table to_table() const;
    // shot, jump_count, first_jump_time (NaN without jumps).
    Table shot_summary() const;
};

// Shots are split into at most kEnsembleBatches fixed batches; standard errors
// are batch-mean estimates. Output is independent of cfg.jobs.
inline constexpr std::size_t kEnsembleBatches = 20;

EnsembleResult run_ensemble(const StateVector4& psi0, const SystemParams& params, const CircuitConfig& cfg,
                            const RateSchedule& schedule);
EnsembleResult run_ensemble(const StateVector4& psi0, const SystemParams& params, const CircuitConfig& cfg);

enum class ContinuationMode { rk4, nmqj };

struct ContinuationConfig {
    ContinuationMode mode = ContinuationMode::rk4;
    double dt = 2e-4;
    int record_stride = 50;
    int n_max = 2; // nmqj only
};

// Propagates a temporal state from t_switch to t_max under the time-dependent
// rate. Throws ValidationError if gamma_0(t_switch) < 0.
ObservableSeries continue_from_temporal_state(const DensityMatrix4& rho, const SystemParams& params, double t_switch,
                                              double t_max, const ContinuationConfig& cfg = {});

} // namespace qbatt
