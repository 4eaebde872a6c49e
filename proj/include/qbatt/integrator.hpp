// integrator.hpp: fixed-step RK4 for the master equation and the per-step
// unitaries shared by the trajectory methods.

#pragma once

#include <string>
#include <vector>

#include "qbatt/model.hpp"
#include "qbatt/observables.hpp"
#include "qbatt/qmath.hpp"

namespace qbatt {

// (i) time-dependent gamma_0, (ii) constant gamma_0(inf), (iii) no reservoir.
enum class EvolutionMode { non_markovian, markovian_asymptotic, unitary };
enum class DissipatorKind { dephasing_only, full_secular };
// co_rotating also rotates the battery at omega_B, which leaves ergotropy and
// concurrence unchanged but removes the fast phase from H1.
enum class Frame { rotating, co_rotating };
enum class PropagatorKind { midpoint, magnus4 };

struct EvolutionConfig {
    double dt = 2e-4;
    double t_max = 1.2;
    double t_start = 0.0;
    EvolutionMode mode = EvolutionMode::non_markovian;
    DissipatorKind dissipator = DissipatorKind::dephasing_only;
    int record_stride = 1;
    Frame frame = Frame::rotating;

    // Largest dt * (explicit phase rate of H1) accepted.
    static constexpr double kMaxPhasePerStep = 0.05;

    // Throws ValidationError on a bad grid, an unresolved H1 phase or an
    // off-resonant dissipative run.
    void validate(const SystemParams& params) const;
    std::size_t steps() const;
};

// Angular rate of the explicit time dependence of H1 in the given frame.
double h1_phase_rate(const SystemParams& params, Frame frame);

ComplexMatrix hamiltonian(const SystemParams& params, double t, Frame frame);

// Right-hand side of the master equation with its rate functions resolved once.
class MasterEquation {
public:
    MasterEquation(const SystemParams& params, EvolutionMode mode, DissipatorKind dissipator = DissipatorKind::dephasing_only,
                   Frame frame = Frame::rotating);

    // Replaces gamma_0(t) (the secular channels are unaffected). Used for
    // constant-rate stubs.
    void override_gamma0(RateFunction gamma0);

    const SystemParams& params() const { return params_; }
    EvolutionMode mode() const { return mode_; }
    Frame frame() const { return frame_; }

    double gamma0(double t) const;
    SecularRates rates(double t) const;
    ComplexMatrix hamiltonian(double t) const;
    ComplexMatrix rhs(double t, const ComplexMatrix& rho) const;

private:
    SystemParams params_;
    EvolutionMode mode_;
    DissipatorKind dissipator_;
    Frame frame_;
    ComplexMatrix h0_;
    RateFunction gamma0_override_;
};

ComplexMatrix rhs(double t, const DensityMatrix4& rho, const SystemParams& params, EvolutionMode mode);

struct Diagnostics {
    double max_trace_dev = 0.0;
    double min_eigenvalue = 1.0;
    double max_hermiticity_error = 0.0; // before symmetrization
    std::vector<std::string> warnings;
};

struct EvolutionResult {
    std::vector<double> times;
    std::vector<DensityMatrix4> states;
    ObservableSeries series;
    Diagnostics diagnostics;
};

// Positivity and trace thresholds of the run monitor.
inline constexpr double kTraceAbort = 1e-6;
inline constexpr double kPositivityWarn = -1e-7;
inline constexpr double kPositivityAbort = -1e-4;

// Classic RK4 from cfg.t_start to cfg.t_max. Records every record_stride
// steps plus the final step. Throws NumericalError if the trace drifts by more
// than kTraceAbort or an eigenvalue drops below kPositivityAbort.
EvolutionResult evolve(const DensityMatrix4& rho0, const EvolutionConfig& cfg, const MasterEquation& equation);
EvolutionResult evolve(const DensityMatrix4& rho0, const EvolutionConfig& cfg, const SystemParams& params);

// Unitary for the step [t, t + dt]. midpoint: exp(-i H(t + dt/2) dt).
// magnus4: two-point Gauss-Legendre Magnus expansion, fourth order.
ComplexMatrix step_propagator(double t, double dt, const SystemParams& params,
                              PropagatorKind kind = PropagatorKind::midpoint, Frame frame = Frame::rotating);

// Propagators for the steps starting at k*dt, k = 0..count-1.
std::vector<ComplexMatrix> step_propagators(std::size_t count, double dt, const SystemParams& params,
                                            PropagatorKind kind = PropagatorKind::midpoint,
                                            Frame frame = Frame::rotating);

} // namespace qbatt
