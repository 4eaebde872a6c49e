#include "qbatt/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qbatt/error.hpp"

namespace qbatt {

double SystemParams::delta() const { return std::abs(omega_A - omega_L); }

double SystemParams::derived_p() const { return std::hypot(delta(), Omega) / lambda; }

double SystemParams::omega0() const { return omega_L + s * lambda; }

double SystemParams::tau_A() const { return 1.0 / std::hypot(delta(), Omega); }

void SystemParams::validate() const
{
    const auto non_negative = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ValidationError(std::string("SystemParams: ") + name + " must be a finite value >= 0");
        }
    };
    non_negative(omega_A, "omega_A");
    non_negative(omega_B, "omega_B");
    non_negative(omega_L, "omega_L");
    non_negative(Omega, "Omega");
    non_negative(g, "g");
    non_negative(p, "p");
    if (!(eta_sq > 0.0) || !std::isfinite(eta_sq)) {
        throw ValidationError("SystemParams: eta_sq must be > 0");
    }
    if (!std::isfinite(s)) {
        throw ValidationError("SystemParams: s must be finite");
    }
}

bool SystemParams::check_secular(std::vector<std::string>* warnings) const
{
    if (p >= 10.0) {
        return true;
    }
    if (warnings != nullptr) {
        warnings->push_back("secular approximation needs p >> 1, got p = " + to_text(p));
    }
    return false;
}

void SystemParams::check_resonant() const
{
    if (delta() != 0.0) {
        throw ValidationError("dissipative dynamics requires resonance omega_A == omega_L (Delta = " +
                              to_text(delta()) + ")");
    }
}

double lorentzian_density(const SystemParams& params, double omega)
{
    const double l = SystemParams::lambda;
    const double d = omega - params.omega0();
    return params.eta_sq / (2.0 * std::numbers::pi) * l * l / (d * d + l * l);
}

namespace {

struct ChannelConstants {
    double q;
    double prefactor; // eta^2 C_xi / (2 (1 + q^2))
};

ChannelConstants channel_constants(const SystemParams& params, Channel xi)
{
    double sign = 0.0;
    double coefficient = 0.5;
    switch (xi) {
    case Channel::plus:
        sign = 1.0;
        break;
    case Channel::minus:
        sign = -1.0;
        coefficient = -0.5;
        break;
    case Channel::zero:
        break;
    }
    const double q = params.s - sign * params.p;
    return {q, params.eta_sq * coefficient / (2.0 * (1.0 + q * q))};
}

} // namespace

double gamma_xi(const SystemParams& params, double t, Channel xi)
{
    const auto [q, prefactor] = channel_constants(params, xi);
    const double lt = SystemParams::lambda * t;
    const double decay = std::exp(-lt);
    return prefactor * (1.0 - decay * std::cos(q * lt) + decay * q * std::sin(q * lt));
}

double gamma_xi_asymptotic(const SystemParams& params, Channel xi)
{
    return channel_constants(params, xi).prefactor;
}

double gamma0_of_t(const SystemParams& params, double t)
{
    const double s = params.s;
    const double lt = SystemParams::lambda * t;
    return params.eta_sq * (1.0 - std::exp(-lt) * (std::cos(s * lt) - s * std::sin(s * lt))) /
           (4.0 * (1.0 + s * s));
}

double gamma0_asymptotic(const SystemParams& params)
{
    return params.eta_sq / (4.0 * (1.0 + params.s * params.s));
}

double coarse_grained(const RateFunction& rate, double t, double window)
{
    if (window < 0.0) {
        throw ValidationError("coarse_grained: window must be >= 0");
    }
    const double a = t - 0.5 * window;
    if (a < 0.0) {
        throw ValidationError("coarse_grained: window [t - T/2, t + T/2] extends below t = 0");
    }
    if (window == 0.0) {
        return rate(t);
    }
    constexpr int intervals = 200; // even; 201 nodes
    const double h = window / intervals;
    double sum = rate(a) + rate(a + window);
    for (int i = 1; i < intervals; ++i) {
        sum += (i % 2 == 1 ? 4.0 : 2.0) * rate(a + i * h);
    }
    return sum * h / 3.0 / window;
}

double coarse_grained_gamma0(const SystemParams& params, double t, double window)
{
    return coarse_grained([&](double u) { return gamma0_of_t(params, u); }, t, window);
}

ComplexMatrix hamiltonian_H0(const SystemParams& params)
{
    return on_charger(pauli::x()) * cplx(-0.5 * params.Omega) + on_battery(pauli::z()) * cplx(0.5 * params.omega_B);
}

namespace {

ComplexMatrix exchange(double g, double phase_angle)
{
    const cplx phase = std::polar(1.0, phase_angle);
    ComplexMatrix forward = kron(pauli::raising(), pauli::lowering()) * (g * phase);
    return forward + forward.adjoint();
}

ComplexMatrix lindblad_term(const ComplexMatrix& jump, const ComplexMatrix& rho)
{
    const ComplexMatrix jd = jump.adjoint();
    const ComplexMatrix jdj = jd * jump;
    ComplexMatrix out = jump * rho * jd;
    ComplexMatrix anti = jdj * rho + rho * jdj;
    anti *= 0.5;
    return out - anti;
}

} // namespace

ComplexMatrix hamiltonian_H1(const SystemParams& params, double t) { return exchange(params.g, params.omega_L * t); }

ComplexMatrix hamiltonian_H0_corotating(const SystemParams& params)
{
    return on_charger(pauli::x()) * cplx(-0.5 * params.Omega);
}

ComplexMatrix hamiltonian_H1_corotating(const SystemParams& params, double t)
{
    return exchange(params.g, (params.omega_L - params.omega_B) * t);
}

ComplexMatrix dephasing_jump_operator() { return on_charger(pauli::x()); }

ComplexMatrix dissipator_dephasing(const ComplexMatrix& rho, double gamma0)
{
    const ComplexMatrix sx = dephasing_jump_operator();
    ComplexMatrix out = sx * rho * sx - rho;
    out *= gamma0;
    return out;
}

ComplexMatrix dissipator_secular_full(const ComplexMatrix& rho, const SecularRates& rates)
{
    // |+><-| in the sx eigenbasis, written in the sz basis.
    const Ket2 plus = kets::up_x();
    const Ket2 minus = kets::down_x();
    ComplexMatrix bar_raising(2);
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            bar_raising(r, c) = plus[r] * std::conj(minus[c]);
        }
    }
    const ComplexMatrix raise = on_charger(bar_raising);
    const ComplexMatrix lower = raise.adjoint();

    ComplexMatrix out = lindblad_term(lower, rho) * rates.plus;
    out += lindblad_term(raise, rho) * rates.minus;
    out += dissipator_dephasing(rho, rates.zero);
    return out;
}

RateSchedule RateSchedule::build(const SystemParams& params, double t_max, double dt, bool with_secular)
{
    RateSchedule r = from_function([&](double t) { return gamma0_of_t(params, t); }, t_max, dt);
    if (with_secular) {
        r.gamma_plus_.resize(r.size());
        r.gamma_minus_.resize(r.size());
        for (std::size_t k = 0; k < r.size(); ++k) {
            r.gamma_plus_[k] = gamma_xi(params, r.time(k), Channel::plus);
            r.gamma_minus_[k] = gamma_xi(params, r.time(k), Channel::minus);
        }
    }
    return r;
}

RateSchedule RateSchedule::from_function(const RateFunction& gamma0, double t_max, double dt)
{
    if (!(dt > 0.0)) {
        throw ValidationError("RateSchedule: dt must be > 0");
    }
    if (!(t_max > 0.0)) {
        throw ValidationError("RateSchedule: t_max must be > 0");
    }
    RateSchedule r;
    r.dt_ = dt;
    const auto n = static_cast<std::size_t>(std::llround(t_max / dt)) + 1;
    r.gamma0_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        r.gamma0_[k] = gamma0(r.time(k));
    }
    r.segment();
    return r;
}

void RateSchedule::segment()
{
    segments_.clear();
    for (std::size_t k = 0; k < gamma0_.size(); ++k) {
        const int sign = rate_sign(gamma0_[k]);
        if (segments_.empty() || segments_.back().sign != sign) {
            segments_.push_back({k, k + 1, sign});
        } else {
            segments_.back().end = k + 1;
        }
    }
}

std::vector<SignSegment> RateSchedule::negative_segments() const
{
    std::vector<SignSegment> out;
    for (const auto& seg : segments_) {
        if (seg.sign < 0) {
            out.push_back(seg);
        }
    }
    return out;
}

const SignSegment& RateSchedule::segment_of(std::size_t k) const
{
    for (const auto& seg : segments_) {
        if (k >= seg.begin && k < seg.end) {
            return seg;
        }
    }
    throw ValidationError("RateSchedule: grid index " + std::to_string(k) + " out of range");
}

} // namespace qbatt
