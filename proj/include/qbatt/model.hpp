// model.hpp: parameters, reservoir rates, Hamiltonians and dissipators of the
// charger-battery system. Units: lambda = 1, times are lambda*t, rates are in lambda.

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qbatt/qmath.hpp"

namespace qbatt {

struct SystemParams {
    // Spectral width; every time and rate is measured in units of it.
    static constexpr double lambda = 1.0;

    double omega_A = 100.0; // charger splitting
    double omega_B = 100.0; // battery splitting
    double omega_L = 100.0; // drive frequency
    double Omega = 10.0;    // drive amplitude
    double g = 4.0;         // charger-battery coupling
    double eta_sq = 1.0;    // reservoir coupling constant eta^2
    double s = 6.0;         // reservoir detuning (omega_0 - omega_L) / lambda
    double p = 100.0;       // secular parameter used by the gamma_+- channels

    double delta() const;          // |omega_A - omega_L|
    double derived_p() const;      // sqrt(Delta^2 + Omega^2) / lambda
    double omega0() const;         // Lorentzian centre omega_L + s*lambda
    double tau_C() const { return 1.0 / lambda; }
    double tau_A() const;          // (Delta^2 + Omega^2)^(-1/2)

    // Throws ValidationError on negative frequencies or non-positive eta^2.
    void validate() const;
    // True if p >= 10; otherwise appends a warning.
    bool check_secular(std::vector<std::string>* warnings = nullptr) const;
    // Throws ValidationError unless Delta == 0.
    void check_resonant() const;
};

enum class Channel { plus, minus, zero };

// Lorentzian J(omega) = (eta^2 / 2pi) lambda^2 / ((omega - omega_0)^2 + lambda^2).
double lorentzian_density(const SystemParams& params, double omega);

// Secular-channel rate gamma_xi(t) with q_xi = s - xi*p and the resonant
// coefficients C_+ = C_0 = 1/2, C_- = -1/2.
double gamma_xi(const SystemParams& params, double t, Channel xi);
// lim t->inf gamma_xi(t) = eta^2 C_xi / (2 (1 + q_xi^2)).
double gamma_xi_asymptotic(const SystemParams& params, Channel xi);

// Dephasing rate gamma_0(t); may be negative in the early stage.
double gamma0_of_t(const SystemParams& params, double t);

// lim t->inf gamma_0(t) = eta^2 / (4 (1 + s^2)).
double gamma0_asymptotic(const SystemParams& params);

using RateFunction = std::function<double(double)>;

// (1/T) * integral of rate over [t - T/2, t + T/2], composite Simpson with
// at least 101 nodes. T == 0 returns rate(t). Throws if the window starts
// before t = 0.
double coarse_grained(const RateFunction& rate, double t, double window);
double coarse_grained_gamma0(const SystemParams& params, double t, double window);

// Rotating-frame Hamiltonians.
//   H0 = -(Omega/2) sx ⊗ 1 + (omega_B/2) 1 ⊗ sz
//   H1(t) = g (e^{i omega_L t} s+ ⊗ s- + h.c.)
ComplexMatrix hamiltonian_H0(const SystemParams& params);
ComplexMatrix hamiltonian_H1(const SystemParams& params, double t);

// Same dynamics with the battery also co-rotating at omega_B: the battery
// term drops out of H0 and H1 keeps only the residual phase (omega_L - omega_B) t.
ComplexMatrix hamiltonian_H0_corotating(const SystemParams& params);
ComplexMatrix hamiltonian_H1_corotating(const SystemParams& params, double t);

// Jump operator of the dephasing channel, sx on the charger.
ComplexMatrix dephasing_jump_operator();

// gamma_0 (sx rho sx - rho), sx acting on the charger.
ComplexMatrix dissipator_dephasing(const ComplexMatrix& rho, double gamma0);

struct SecularRates {
    double plus = 0.0;
    double minus = 0.0;
    double zero = 0.0;
};

// Full secular dissipator at resonance. The barred ladder operators act in
// the sx eigenbasis of the charger (|+> = |up_x>, |-> = |down_x>).
ComplexMatrix dissipator_secular_full(const ComplexMatrix& rho, const SecularRates& rates);

// Contiguous run of grid points sharing the sign of gamma_0, [begin, end).
struct SignSegment {
    std::size_t begin = 0;
    std::size_t end = 0;
    int sign = 1; // +1 for gamma_0 >= 0, -1 for gamma_0 < 0
};

// |gamma_0| below this is treated as non-negative when segmenting.
inline constexpr double kZeroRateThreshold = 1e-15;

// gamma_0 (and optionally gamma_+-) precomputed on the uniform grid t_k = k*dt.
class RateSchedule {
public:
    RateSchedule() = default;

    static RateSchedule build(const SystemParams& params, double t_max, double dt, bool with_secular = false);
    // Arbitrary gamma_0 profile on the same kind of grid; used for stubs.
    static RateSchedule from_function(const RateFunction& gamma0, double t_max, double dt);

    std::size_t size() const { return gamma0_.size(); }
    double dt() const { return dt_; }
    double time(std::size_t k) const { return static_cast<double>(k) * dt_; }
    double gamma0(std::size_t k) const { return gamma0_[k]; }
    bool has_secular() const { return !gamma_plus_.empty(); }
    double gamma_plus(std::size_t k) const { return gamma_plus_.at(k); }
    double gamma_minus(std::size_t k) const { return gamma_minus_.at(k); }

    const std::vector<double>& gamma0_values() const { return gamma0_; }
    const std::vector<SignSegment>& segments() const { return segments_; }
    std::vector<SignSegment> negative_segments() const;
    const SignSegment& segment_of(std::size_t k) const;

private:
    void segment();

    double dt_ = 0.0;
    std::vector<double> gamma0_;
    std::vector<double> gamma_plus_;
    std::vector<double> gamma_minus_;
    std::vector<SignSegment> segments_;
};

inline int rate_sign(double gamma0) { return gamma0 < -kZeroRateThreshold ? -1 : 1; }

} // namespace qbatt
