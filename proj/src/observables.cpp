#include "qbatt/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qbatt/error.hpp"

namespace qbatt {

std::size_t Table::column_index(const std::string& name) const
{
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) {
        throw ValidationError("Table: no column named '" + name + "'");
    }
    return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::column(const std::string& name) const
{
    const std::size_t c = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        out.push_back(row[c]);
    }
    return out;
}

double BlochVector::length() const { return std::sqrt(x * x + y * y + z * z); }

BlochVector bloch_vector(const ComplexMatrix& rho2)
{
    if (rho2.dim() != 2) {
        throw ValidationError("bloch_vector: expected a 2x2 matrix");
    }
    const cplx coherence = rho2(kExcited, kGround);
    return {2.0 * coherence.real(), -2.0 * coherence.imag(),
            rho2(kExcited, kExcited).real() - rho2(kGround, kGround).real()};
}

double energy(const DensityMatrix4& rho, double omega_B)
{
    return omega_B * partial_trace_charger(rho)(kExcited, kExcited).real();
}

double ergotropy(const DensityMatrix4& rho, double omega_B)
{
    const BlochVector r = bloch_vector(partial_trace_charger(rho));
    return 0.5 * omega_B * (r.length() + r.z);
}

double ergotropy_oracle(const ComplexMatrix& rho_B, double omega_B)
{
    const ComplexMatrix h = pauli::z() * cplx(0.5 * omega_B);
    const double mean_energy = (h * rho_B).trace().real();
    const HermitianEigen e = hermitian_eigen(hermitian_part(rho_B));
    // Passive state: the larger population sits on the lower level.
    const double e_low = -0.5 * omega_B;
    const double e_high = 0.5 * omega_B;
    const double passive_energy = e.values[0] * e_low + e.values[1] * e_high;
    return mean_energy - passive_energy;
}

double concurrence(const DensityMatrix4& rho)
{
    const ComplexMatrix yy = kron(pauli::y(), pauli::y());
    const ComplexMatrix& m = rho.matrix();
    const ComplexMatrix flipped = yy * m.conjugate() * yy;
    const ComplexMatrix root = psd_sqrt(hermitian_part(m));
    const ComplexMatrix r = psd_sqrt(hermitian_part(root * flipped * root));
    const HermitianEigen e = hermitian_eigen(r);
    const double c = e.values[0] - e.values[1] - e.values[2] - e.values[3];
    return std::clamp(c, 0.0, 1.0);
}

double purity(const DensityMatrix4& rho) { return (rho.matrix() * rho.matrix()).trace().real(); }

ObservableRow observe(const DensityMatrix4& rho, double t, double gamma0)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    ObservableRow row;
    row.lambda_t = t;
    row.gamma0 = gamma0;
    row.energy_over_omegaB = energy(rho, 1.0);
    row.ergotropy_over_omegaB = ergotropy(rho, 1.0);
    row.concurrence = concurrence(rho);
    row.K0 = row.K1_sum = row.K2_sum = row.K_total = nan;
    row.trace_dev = rho.trace() - 1.0;
    row.min_eig = rho.min_eigenvalue();
    return row;
}

std::vector<std::string> ObservableSeries::violations(double tol) const
{
    std::vector<std::string> out;
    const auto in_unit = [&](double v) { return v >= -tol && v <= 1.0 + tol; };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const std::string at = " at row " + std::to_string(i) + " (t = " + to_text(r.lambda_t) + ")";
        if (!in_unit(r.concurrence)) {
            out.push_back("concurrence outside [0,1]" + at);
        }
        if (!in_unit(r.ergotropy_over_omegaB)) {
            out.push_back("ergotropy/omega_B outside [0,1]" + at);
        }
        if (!in_unit(r.energy_over_omegaB)) {
            out.push_back("energy/omega_B outside [0,1]" + at);
        }
        if (i > 0 && !(r.lambda_t > rows[i - 1].lambda_t)) {
            out.push_back("times not strictly increasing" + at);
        }
    }
    return out;
}

const std::vector<std::string>& ObservableSeries::column_names()
{
    static const std::vector<std::string> names{
        "lambda_t", "gamma0", "energy_over_omegaB", "ergotropy_over_omegaB", "concurrence", "K0",
        "K1_sum",   "K2_sum", "K_total",            "trace_dev",             "min_eig"};
    return names;
}

Table ObservableSeries::to_table() const
{
    Table t;
    t.columns = column_names();
    t.rows.reserve(rows.size());
    for (const auto& r : rows) {
        t.rows.push_back({r.lambda_t, r.gamma0, r.energy_over_omegaB, r.ergotropy_over_omegaB, r.concurrence, r.K0,
                          r.K1_sum, r.K2_sum, r.K_total, r.trace_dev, r.min_eig});
    }
    return t;
}

std::vector<double> ObservableSeries::times() const
{
    std::vector<double> out;
    for (const auto& r : rows) {
        out.push_back(r.lambda_t);
    }
    return out;
}

std::vector<double> ObservableSeries::ergotropy() const
{
    std::vector<double> out;
    for (const auto& r : rows) {
        out.push_back(r.ergotropy_over_omegaB);
    }
    return out;
}

std::vector<double> ObservableSeries::concurrence() const
{
    std::vector<double> out;
    for (const auto& r : rows) {
        out.push_back(r.concurrence);
    }
    return out;
}

} // namespace qbatt
