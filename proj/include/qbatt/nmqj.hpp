// nmqj.hpp: deterministic non-Markovian quantum-jump hierarchy truncated at
// two jumps, with reversed jumps while the dephasing rate is negative.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qbatt/integrator.hpp"
#include "qbatt/model.hpp"
#include "qbatt/observables.hpp"
#include "qbatt/qmath.hpp"

namespace qbatt {

inline constexpr int kMaxJumpLevel = 2;

// conserving: the deepest kept level receives no reversed-jump gain, so the
// total weight is conserved. literal: it gains |gamma_0| dt K like every
// other level, as if the next level existed.
enum class NmqjVariant { conserving, literal };

// The only jump channel: sx on the charger. It squares to the identity, which
// makes the jump probability gamma_0 dt state-independent.
ComplexMatrix jump_operator();

struct LevelOneEntry {
    std::size_t jump_index = 0; // grid step of the jump
    StateVector4 state;         // in the frame of the accumulated unitary
    double weight = 0.0;
};

// Everything that jumped once more after leaving one level-1 mother.
struct LevelTwoAggregate {
    ComplexMatrix sigma{4}; // in the frame of the accumulated unitary
    double weight = 0.0;
};

class TrajectoryHierarchy {
public:
    explicit TrajectoryHierarchy(const StateVector4& psi0, int n_max = kMaxJumpLevel);

    int n_max() const { return n_max_; }
    double K0() const { return k0_; }
    double K1_sum() const;
    double K2_sum() const;
    double total_weight() const { return k0_ + K1_sum() + K2_sum(); }

    const std::vector<LevelOneEntry>& level1() const { return level1_; }
    const std::vector<LevelTwoAggregate>& level2() const { return level2_; }

    // Current (lab-frame) states.
    StateVector4 level0_state() const;
    StateVector4 level1_state(std::size_t i) const;
    ComplexMatrix level2_sigma(std::size_t i) const;

    // One step with gamma_0 >= 0. Jumps use the pre-step states and weights;
    // newborn entries do not decay within their birth step. Returns the weight
    // that would have moved past n_max and is dropped.
    double step_positive(std::size_t step, double gamma0, double dt, const ComplexMatrix& U);

    // One step with gamma_0 < 0: reversed jumps move weight from each level
    // back to its mother. Requested transfers larger than the weight available
    // are capped; the shortfall is returned (zero for a fully conserving step).
    double step_negative(double gamma0, double dt, const ComplexMatrix& U,
                         NmqjVariant variant = NmqjVariant::conserving);

    // K-weighted mixture of all stored trajectories; trace = total_weight().
    DensityMatrix4 reconstruct(bool renormalize = false) const;

private:
    void advance(const ComplexMatrix& U);

    int n_max_;
    StateVector4 psi0_; // level-0 state in the frame; constant
    double k0_ = 1.0;
    std::vector<LevelOneEntry> level1_;
    std::vector<LevelTwoAggregate> level2_;
    ComplexMatrix frame_; // product of all step unitaries so far
};

struct NmqjConfig {
    double dt = 5e-4;
    double t_max = 1.2;
    int n_max = kMaxJumpLevel;
    int record_stride = 1;
    bool renormalize = false;
    NmqjVariant variant = NmqjVariant::conserving;
    PropagatorKind propagator = PropagatorKind::midpoint;
    Frame frame = Frame::rotating;
    // Cumulative capped-transfer shortfall tolerated before the run fails.
    double clamp_tolerance = 1e-4;

    void validate() const;
};

struct NmqjResult {
    ObservableSeries series;
    std::vector<DensityMatrix4> states; // one per series row
    double clamp_total = 0.0;
    double discarded_total = 0.0;
    std::vector<std::string> warnings;
};

// Runs the hierarchy on the grid of the schedule (its dt must match cfg.dt).
// Throws NumericalError if gamma_0 dt reaches 1 or the clamp total exceeds
// cfg.clamp_tolerance.
NmqjResult run_nmqj(const StateVector4& psi0, const SystemParams& params, const NmqjConfig& cfg,
                    const RateSchedule& schedule);
NmqjResult run_nmqj(const StateVector4& psi0, const SystemParams& params, const NmqjConfig& cfg);

} // namespace qbatt
