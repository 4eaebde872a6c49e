#include "qbatt/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qbatt/error.hpp"

namespace qbatt {

double h1_phase_rate(const SystemParams& params, Frame frame)
{
    return frame == Frame::rotating ? params.omega_L : std::abs(params.omega_L - params.omega_B);
}

std::size_t EvolutionConfig::steps() const
{
    return static_cast<std::size_t>(std::llround((t_max - t_start) / dt));
}

void EvolutionConfig::validate(const SystemParams& params) const
{
    params.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ValidationError("EvolutionConfig: dt must be > 0");
    }
    if (!(t_start >= 0.0) || !(t_max > t_start)) {
        throw ValidationError("EvolutionConfig: need 0 <= t_start < t_max");
    }
    if (record_stride < 1) {
        throw ValidationError("EvolutionConfig: record_stride must be >= 1");
    }
    const double phase = dt * h1_phase_rate(params, frame);
    if (phase > kMaxPhasePerStep) {
        throw ValidationError("EvolutionConfig: dt * omega_L = " + to_text(phase) +
                              " exceeds 0.05; the drive phase of H1 is not resolved");
    }
    if (mode != EvolutionMode::unitary) {
        params.check_resonant();
    }
}

ComplexMatrix hamiltonian(const SystemParams& params, double t, Frame frame)
{
    if (frame == Frame::rotating) {
        return hamiltonian_H0(params) + hamiltonian_H1(params, t);
    }
    return hamiltonian_H0_corotating(params) + hamiltonian_H1_corotating(params, t);
}

MasterEquation::MasterEquation(const SystemParams& params, EvolutionMode mode, DissipatorKind dissipator, Frame frame)
    : params_(params), mode_(mode), dissipator_(dissipator), frame_(frame),
      h0_(frame == Frame::rotating ? hamiltonian_H0(params) : hamiltonian_H0_corotating(params))
{
}

void MasterEquation::override_gamma0(RateFunction gamma0) { gamma0_override_ = std::move(gamma0); }

double MasterEquation::gamma0(double t) const
{
    if (gamma0_override_) {
        return gamma0_override_(t);
    }
    switch (mode_) {
    case EvolutionMode::non_markovian:
        return gamma0_of_t(params_, t);
    case EvolutionMode::markovian_asymptotic:
        return gamma0_asymptotic(params_);
    case EvolutionMode::unitary:
        break;
    }
    return 0.0;
}

SecularRates MasterEquation::rates(double t) const
{
    SecularRates r;
    if (mode_ == EvolutionMode::unitary && !gamma0_override_) {
        return r;
    }
    r.zero = gamma0(t);
    if (dissipator_ == DissipatorKind::full_secular) {
        if (mode_ == EvolutionMode::markovian_asymptotic) {
            r.plus = gamma_xi_asymptotic(params_, Channel::plus);
            r.minus = gamma_xi_asymptotic(params_, Channel::minus);
        } else if (mode_ == EvolutionMode::non_markovian) {
            r.plus = gamma_xi(params_, t, Channel::plus);
            r.minus = gamma_xi(params_, t, Channel::minus);
        }
    }
    return r;
}

ComplexMatrix MasterEquation::hamiltonian(double t) const
{
    return h0_ + (frame_ == Frame::rotating ? hamiltonian_H1(params_, t) : hamiltonian_H1_corotating(params_, t));
}

ComplexMatrix MasterEquation::rhs(double t, const ComplexMatrix& rho) const
{
    const ComplexMatrix h = hamiltonian(t);
    ComplexMatrix out = (h * rho - rho * h) * cplx(0.0, -1.0);
    const SecularRates r = rates(t);
    if (dissipator_ == DissipatorKind::full_secular) {
        out += dissipator_secular_full(rho, r);
    } else if (r.zero != 0.0) {
        out += dissipator_dephasing(rho, r.zero);
    }
    return out;
}

ComplexMatrix rhs(double t, const DensityMatrix4& rho, const SystemParams& params, EvolutionMode mode)
{
    return MasterEquation(params, mode).rhs(t, rho.matrix());
}

namespace {

std::string at_time(double t) { return " at lambda*t = " + to_text(t); }

} // namespace

EvolutionResult evolve(const DensityMatrix4& rho0, const EvolutionConfig& cfg, const MasterEquation& equation)
{
    cfg.validate(equation.params());
    if (cfg.frame != equation.frame()) {
        throw ValidationError("evolve: configuration frame differs from the master equation frame");
    }
    const double dt = cfg.dt;
    const std::size_t n = cfg.steps();
    const double initial_trace = rho0.trace();

    EvolutionResult result;
    Diagnostics& diag = result.diagnostics;
    bool warned_positivity = false;

    const auto record = [&](double t, const DensityMatrix4& rho) {
        result.times.push_back(t);
        result.states.push_back(rho);
        result.series.rows.push_back(observe(rho, t, equation.gamma0(t)));
    };

    ComplexMatrix rho = rho0.matrix();
    record(cfg.t_start, rho0);

    for (std::size_t k = 0; k < n; ++k) {
        const double t = cfg.t_start + static_cast<double>(k) * dt;
        const double half = 0.5 * dt;
        const ComplexMatrix k1 = equation.rhs(t, rho);
        const ComplexMatrix k2 = equation.rhs(t + half, rho + k1 * cplx(half));
        const ComplexMatrix k3 = equation.rhs(t + half, rho + k2 * cplx(half));
        const ComplexMatrix k4 = equation.rhs(t + dt, rho + k3 * cplx(dt));
        ComplexMatrix increment = k1 + k4;
        increment += (k2 + k3) * cplx(2.0);
        rho += increment * cplx(dt / 6.0);

        const double t_next = cfg.t_start + static_cast<double>(k + 1) * dt;
        diag.max_hermiticity_error = std::max(diag.max_hermiticity_error, max_abs_diff(rho, rho.adjoint()));
        rho = hermitian_part(rho);

        const double trace_dev = std::abs(rho.trace().real() - initial_trace);
        diag.max_trace_dev = std::max(diag.max_trace_dev, trace_dev);
        if (!(trace_dev <= kTraceAbort)) {
            throw NumericalError("evolve: trace drifted by " + to_text(trace_dev) + at_time(t_next));
        }

        const DensityMatrix4 state = DensityMatrix4::from_matrix(rho);
        const bool recorded = (k + 1) % static_cast<std::size_t>(cfg.record_stride) == 0 || k + 1 == n;
        const double min_eig = state.min_eigenvalue();
        diag.min_eigenvalue = std::min(diag.min_eigenvalue, min_eig);
        if (min_eig < kPositivityAbort) {
            throw NumericalError("evolve: density matrix eigenvalue " + to_text(min_eig) + at_time(t_next));
        }
        if (min_eig < kPositivityWarn && !warned_positivity) {
            warned_positivity = true;
            diag.warnings.push_back("evolve: eigenvalue " + to_text(min_eig) + " below -1e-7" +
                                    at_time(t_next));
        }
        if (recorded) {
            record(t_next, state);
        }
    }
    return result;
}

EvolutionResult evolve(const DensityMatrix4& rho0, const EvolutionConfig& cfg, const SystemParams& params)
{
    return evolve(rho0, cfg, MasterEquation(params, cfg.mode, cfg.dissipator, cfg.frame));
}

ComplexMatrix step_propagator(double t, double dt, const SystemParams& params, PropagatorKind kind, Frame frame)
{
    if (!(dt > 0.0)) {
        throw ValidationError("step_propagator: dt must be > 0");
    }
    if (kind == PropagatorKind::midpoint) {
        return expm_hermitian_scaled(hamiltonian(params, t + 0.5 * dt, frame), cplx(0.0, -dt));
    }
    const double offset = std::sqrt(3.0) / 6.0;
    const ComplexMatrix a = hamiltonian(params, t + (0.5 - offset) * dt, frame);
    const ComplexMatrix b = hamiltonian(params, t + (0.5 + offset) * dt, frame);
    ComplexMatrix effective = (a + b) * cplx(0.5);
    effective += (a * b - b * a) * cplx(0.0, std::sqrt(3.0) * dt / 12.0);
    return expm_hermitian_scaled(hermitian_part(effective), cplx(0.0, -dt));
}

std::vector<ComplexMatrix> step_propagators(std::size_t count, double dt, const SystemParams& params,
                                            PropagatorKind kind, Frame frame)
{
    std::vector<ComplexMatrix> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(step_propagator(static_cast<double>(k) * dt, dt, params, kind, frame));
    }
    return out;
}

} // namespace qbatt
