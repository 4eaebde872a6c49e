// observables.hpp: battery energy, ergotropy, concurrence and the time series
// that carries them.

#pragma once

#include <string>
#include <vector>

#include "qbatt/qmath.hpp"
#include "qbatt/table.hpp"

namespace qbatt {

// Bloch components of a (possibly sub-normalized) single-qubit matrix:
// rho = (tr + x sx + y sy + z sz) / 2.
struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double length() const;
};

BlochVector bloch_vector(const ComplexMatrix& rho2);

// (omega_B/2)(1 + r_z) for unit trace; linear in rho in general.
double energy(const DensityMatrix4& rho, double omega_B);
// (omega_B/2)(r + r_z) of the battery's reduced state.
double ergotropy(const DensityMatrix4& rho, double omega_B);
// Independent route: E(rho_B) - E(passive(rho_B)) with H_B = (omega_B/2) sz.
double ergotropy_oracle(const ComplexMatrix& rho_B, double omega_B);
// Wootters concurrence via Hermitian square roots, clamped to [0, 1].
double concurrence(const DensityMatrix4& rho);
double purity(const DensityMatrix4& rho);

struct ObservableRow {
    double lambda_t = 0.0;
    double gamma0 = 0.0;
    double energy_over_omegaB = 0.0;
    double ergotropy_over_omegaB = 0.0;
    double concurrence = 0.0;
    // Trajectory weights; NaN where the producing method has none.
    double K0 = 0.0;
    double K1_sum = 0.0;
    double K2_sum = 0.0;
    double K_total = 0.0;
    double trace_dev = 0.0; // tr(rho) - 1
    double min_eig = 0.0;
};

// Density-derived fields of a row; the weight fields are left NaN.
ObservableRow observe(const DensityMatrix4& rho, double t, double gamma0);

class ObservableSeries {
public:
    std::vector<ObservableRow> rows;

    // Human-readable descriptions of every violated invariant (ranges within
    // tol, strictly increasing times). Empty when the series is sound.
    std::vector<std::string> violations(double tol = 1e-9) const;

    static const std::vector<std::string>& column_names();
    Table to_table() const;

    std::vector<double> times() const;
    std::vector<double> ergotropy() const;
    std::vector<double> concurrence() const;
};

} // namespace qbatt
