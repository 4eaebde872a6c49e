#include "qbatt/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qbatt/error.hpp"

namespace qbatt {

namespace {

void check_dim(int dim)
{
    if (dim != 2 && dim != 4) {
        throw ValidationError("matrix dimension must be 2 or 4, got " + std::to_string(dim));
    }
}

void check_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* op)
{
    if (a.dim() != b.dim()) {
        throw ValidationError(std::string(op) + ": dimension mismatch (" + std::to_string(a.dim()) +
                              " vs " + std::to_string(b.dim()) + ")");
    }
}

double hermitian_scale(const ComplexMatrix& m) { return std::max(1.0, m.max_abs()); }

void require_hermitian(const ComplexMatrix& m, const char* op)
{
    if (!m.is_hermitian(1e-10 * hermitian_scale(m))) {
        throw ValidationError(std::string(op) + ": input is not Hermitian");
    }
}

double off_diagonal_norm(const ComplexMatrix& a)
{
    double s = 0.0;
    for (int r = 0; r < a.dim(); ++r) {
        for (int c = 0; c < a.dim(); ++c) {
            if (r != c) {
                s += std::norm(a(r, c));
            }
        }
    }
    return std::sqrt(s);
}

// Off-diagonal Frobenius norm at which a sweep sequence stops, relative to
// max(1, |m|_F). Well below the 1e-12 needed for 1e-10 reconstruction so
// that small eigenvalues (concurrence, PSD roots) stay accurate.
constexpr double kJacobiTolerance = 1e-15;
constexpr int kJacobiMaxSweeps = 100;

} // namespace

ComplexMatrix::ComplexMatrix(int dim) : dim_(dim) { check_dim(dim); }

ComplexMatrix::ComplexMatrix(int dim, std::initializer_list<cplx> row_major) : ComplexMatrix(dim)
{
    if (row_major.size() != static_cast<std::size_t>(dim * dim)) {
        throw ValidationError("ComplexMatrix: expected " + std::to_string(dim * dim) + " entries");
    }
    std::copy(row_major.begin(), row_major.end(), a_.begin());
}

ComplexMatrix ComplexMatrix::identity(int dim)
{
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const
{
    ComplexMatrix m(dim_);
    for (int r = 0; r < dim_; ++r) {
        for (int c = 0; c < dim_; ++c) {
            m(c, r) = std::conj((*this)(r, c));
        }
    }
    return m;
}

ComplexMatrix ComplexMatrix::conjugate() const
{
    ComplexMatrix m(dim_);
    for (int i = 0; i < dim_ * dim_; ++i) {
        m.a_[i] = std::conj(a_[i]);
    }
    return m;
}

cplx ComplexMatrix::trace() const
{
    cplx t = 0.0;
    for (int i = 0; i < dim_; ++i) {
        t += (*this)(i, i);
    }
    return t;
}

double ComplexMatrix::max_abs() const
{
    double m = 0.0;
    for (int i = 0; i < dim_ * dim_; ++i) {
        m = std::max(m, std::abs(a_[i]));
    }
    return m;
}

double ComplexMatrix::frobenius_norm() const
{
    double s = 0.0;
    for (int i = 0; i < dim_ * dim_; ++i) {
        s += std::norm(a_[i]);
    }
    return std::sqrt(s);
}

bool ComplexMatrix::is_hermitian(double tol) const
{
    for (int r = 0; r < dim_; ++r) {
        for (int c = r; c < dim_; ++c) {
            if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) {
                return false;
            }
        }
    }
    return true;
}

bool ComplexMatrix::is_unitary(double tol) const
{
    return max_abs_diff(adjoint() * (*this), identity(dim_)) <= tol;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o)
{
    check_same_dim(*this, o, "operator+");
    for (int i = 0; i < dim_ * dim_; ++i) {
        a_[i] += o.a_[i];
    }
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o)
{
    check_same_dim(*this, o, "operator-");
    for (int i = 0; i < dim_ * dim_; ++i) {
        a_[i] -= o.a_[i];
    }
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s)
{
    for (int i = 0; i < dim_ * dim_; ++i) {
        a_[i] *= s;
    }
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b)
{
    check_same_dim(a, b, "operator*");
    const int n = a.dim();
    ComplexMatrix m(n);
    for (int r = 0; r < n; ++r) {
        for (int k = 0; k < n; ++k) {
            const cplx ark = a(r, k);
            for (int c = 0; c < n; ++c) {
                m(r, c) += ark * b(k, c);
            }
        }
    }
    return m;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).max_abs(); }

double StateVector4::norm() const
{
    double s = 0.0;
    for (const auto& x : amp_) {
        s += std::norm(x);
    }
    return std::sqrt(s);
}

StateVector4 StateVector4::normalized() const
{
    const double n = norm();
    if (n == 0.0) {
        throw NumericalError("cannot normalize a zero state vector");
    }
    StateVector4 v = *this;
    for (auto& x : v.amp_) {
        x /= n;
    }
    return v;
}

StateVector4 operator*(const ComplexMatrix& m, const StateVector4& v)
{
    if (m.dim() != 4) {
        throw ValidationError("operator*: state vectors need a 4x4 operator");
    }
    StateVector4 out;
    for (int r = 0; r < 4; ++r) {
        out[r] = m(r, 0) * v[0] + m(r, 1) * v[1] + m(r, 2) * v[2] + m(r, 3) * v[3];
    }
    return out;
}

cplx inner(const StateVector4& a, const StateVector4& b)
{
    cplx s = 0.0;
    for (int i = 0; i < 4; ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

ComplexMatrix outer(const StateVector4& a, const StateVector4& b)
{
    ComplexMatrix m(4);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            m(r, c) = a[r] * std::conj(b[c]);
        }
    }
    return m;
}

StateVector4 product_state(const Ket2& charger, const Ket2& battery)
{
    return {charger[0] * battery[0], charger[0] * battery[1], charger[1] * battery[0],
            charger[1] * battery[1]};
}

DensityMatrix4 DensityMatrix4::from_matrix(const ComplexMatrix& m, double hermitian_tol)
{
    if (m.dim() != 4) {
        throw ValidationError("DensityMatrix4: expected a 4x4 matrix");
    }
    if (!m.is_hermitian(hermitian_tol * hermitian_scale(m))) {
        throw ValidationError("DensityMatrix4: matrix is not Hermitian");
    }
    return DensityMatrix4(m);
}

DensityMatrix4 DensityMatrix4::from_pure(const StateVector4& psi) { return DensityMatrix4(outer(psi, psi)); }

double DensityMatrix4::min_eigenvalue() const { return hermitian_eigen(hermitian_part(m_)).values[3]; }

ComplexMatrix hermitian_part(const ComplexMatrix& a)
{
    ComplexMatrix h = a + a.adjoint();
    h *= 0.5;
    return h;
}

namespace pauli {
ComplexMatrix identity() { return ComplexMatrix::identity(2); }
ComplexMatrix x() { return ComplexMatrix(2, {0.0, 1.0, 1.0, 0.0}); }
ComplexMatrix y() { return ComplexMatrix(2, {0.0, cplx(0, -1), cplx(0, 1), 0.0}); }
ComplexMatrix z() { return ComplexMatrix(2, {1.0, 0.0, 0.0, -1.0}); }
ComplexMatrix raising() { return ComplexMatrix(2, {0.0, 1.0, 0.0, 0.0}); }
ComplexMatrix lowering() { return ComplexMatrix(2, {0.0, 0.0, 1.0, 0.0}); }
} // namespace pauli

namespace kets {
namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}
Ket2 up_z() { return {1.0, 0.0}; }
Ket2 down_z() { return {0.0, 1.0}; }
Ket2 up_x() { return {kInvSqrt2, kInvSqrt2}; }
Ket2 down_x() { return {kInvSqrt2, -kInvSqrt2}; }
Ket2 up_y() { return {kInvSqrt2, cplx(0, kInvSqrt2)}; }
Ket2 down_y() { return {kInvSqrt2, cplx(0, -kInvSqrt2)}; }
} // namespace kets

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.dim() != 2 || b.dim() != 2) {
        throw ValidationError("kron: both factors must be 2x2");
    }
    ComplexMatrix m(4);
    for (int ar = 0; ar < 2; ++ar) {
        for (int ac = 0; ac < 2; ++ac) {
            for (int br = 0; br < 2; ++br) {
                for (int bc = 0; bc < 2; ++bc) {
                    m(2 * ar + br, 2 * ac + bc) = a(ar, ac) * b(br, bc);
                }
            }
        }
    }
    return m;
}

ComplexMatrix on_charger(const ComplexMatrix& a) { return kron(a, pauli::identity()); }
ComplexMatrix on_battery(const ComplexMatrix& b) { return kron(pauli::identity(), b); }

HermitianEigen hermitian_eigen(const ComplexMatrix& m)
{
    require_hermitian(m, "hermitian_eigen");
    const int n = m.dim();
    ComplexMatrix a = hermitian_part(m);
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double tol = kJacobiTolerance * std::max(1.0, a.frobenius_norm());

    double previous_off = off_diagonal_norm(a);
    for (int sweep = 0; sweep < kJacobiMaxSweeps && previous_off > tol; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double r = std::abs(apq);
                if (r < 1e-300) {
                    continue;
                }
                // Phase q so that the (p,q) element becomes real, then a real
                // rotation that annihilates it.
                const cplx phase = apq / r;
                const double theta = 0.5 * std::atan2(2.0 * r, a(q, q).real() - a(p, p).real());
                const double c = std::cos(theta);
                const double s = std::sin(theta);
                ComplexMatrix g = ComplexMatrix::identity(n);
                g(p, p) = c;
                g(p, q) = s;
                g(q, p) = -s * std::conj(phase);
                g(q, q) = c * std::conj(phase);
                a = g.adjoint() * a * g;
                v = v * g;
            }
        }
        const double off = off_diagonal_norm(a);
        if (off >= previous_off) {
            break; // stalled at roundoff
        }
        previous_off = off;
    }

    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.begin() + n,
              [&](int i, int j) { return a(i, i).real() > a(j, j).real(); });

    HermitianEigen out;
    out.dim = n;
    out.vectors = ComplexMatrix(n);
    for (int k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (int r = 0; r < n; ++r) {
            out.vectors(r, k) = v(r, order[k]);
        }
    }
    return out;
}

namespace {

template <class F>
ComplexMatrix spectral_map(const HermitianEigen& e, F&& f)
{
    const int n = e.dim;
    ComplexMatrix out(n);
    for (int k = 0; k < n; ++k) {
        const cplx fk = f(e.values[k]);
        for (int r = 0; r < n; ++r) {
            const cplx vr = e.vectors(r, k) * fk;
            for (int c = 0; c < n; ++c) {
                out(r, c) += vr * std::conj(e.vectors(c, k));
            }
        }
    }
    return out;
}

} // namespace

ComplexMatrix expm_hermitian_scaled(const ComplexMatrix& h, cplx factor)
{
    require_hermitian(h, "expm_hermitian_scaled");
    return spectral_map(hermitian_eigen(h), [&](double lam) { return std::exp(factor * lam); });
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m)
{
    require_hermitian(m, "psd_sqrt");
    const HermitianEigen e = hermitian_eigen(m);
    if (e.values[e.dim - 1] < -1e-6) {
        throw NumericalError("psd_sqrt: eigenvalue " + to_text(e.values[e.dim - 1]) +
                             " is significantly negative");
    }
    ComplexMatrix r = spectral_map(e, [](double lam) { return cplx(std::sqrt(std::max(lam, 0.0))); });
    return hermitian_part(r);
}

ComplexMatrix partial_trace_charger(const ComplexMatrix& rho)
{
    if (rho.dim() != 4) {
        throw ValidationError("partial_trace_charger: expected a 4x4 matrix");
    }
    ComplexMatrix out(2);
    for (int b = 0; b < 2; ++b) {
        for (int bp = 0; bp < 2; ++bp) {
            out(b, bp) = rho(b, bp) + rho(2 + b, 2 + bp);
        }
    }
    return out;
}

ComplexMatrix partial_trace_charger(const DensityMatrix4& rho) { return partial_trace_charger(rho.matrix()); }

} // namespace qbatt
