// qmath.hpp: dense complex linear algebra for one and two qubits

#pragma once

#include <array>
#include <complex>
#include <initializer_list>

namespace qbatt {

using cplx = std::complex<double>;

// Basis convention, fixed for the whole library:
//   single qubit: index 0 = |up_z> (excited), index 1 = |down_z> (ground)
//   two qubits:   charger (A) ⊗ battery (B), joint index = 2*a + b
inline constexpr int kExcited = 0;
inline constexpr int kGround = 1;

// Square complex matrix of dimension 2 or 4, row-major.
class ComplexMatrix {
public:
    ComplexMatrix() : ComplexMatrix(4) {}
    explicit ComplexMatrix(int dim);
    ComplexMatrix(int dim, std::initializer_list<cplx> row_major);

    static ComplexMatrix identity(int dim);
    static ComplexMatrix zero(int dim) { return ComplexMatrix(dim); }

    int dim() const { return dim_; }
    cplx& operator()(int r, int c) { return a_[r * dim_ + c]; }
    const cplx& operator()(int r, int c) const { return a_[r * dim_ + c]; }

    ComplexMatrix adjoint() const;
    ComplexMatrix conjugate() const;
    cplx trace() const;
    double max_abs() const;
    double frobenius_norm() const;

    bool is_hermitian(double tol) const;
    bool is_unitary(double tol) const;

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(cplx s);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

private:
    int dim_;
    std::array<cplx, 16> a_{};
};

// Max-norm distance between two matrices of equal dimension.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

using Ket2 = std::array<cplx, 2>;

// Pure two-qubit state.
class StateVector4 {
public:
    StateVector4() = default;
    StateVector4(cplx a0, cplx a1, cplx a2, cplx a3) : amp_{a0, a1, a2, a3} {}

    cplx& operator[](int i) { return amp_[i]; }
    const cplx& operator[](int i) const { return amp_[i]; }

    double norm() const;
    // Throws on a zero vector.
    StateVector4 normalized() const;
    void normalize() { *this = normalized(); }

private:
    std::array<cplx, 4> amp_{};
};

StateVector4 operator*(const ComplexMatrix& m, const StateVector4& v);
cplx inner(const StateVector4& a, const StateVector4& b); // <a|b>
ComplexMatrix outer(const StateVector4& a, const StateVector4& b); // |a><b|
StateVector4 product_state(const Ket2& charger, const Ket2& battery);

// Joint density matrix of charger and battery. Always 4x4 and Hermitian;
// the trace is not forced to one (partial reconstructions carry their weight).
class DensityMatrix4 {
public:
    DensityMatrix4() : m_(4) {}

    // Validates dimension and Hermiticity (tolerance relative to max|m|).
    static DensityMatrix4 from_matrix(const ComplexMatrix& m, double hermitian_tol = 1e-10);
    static DensityMatrix4 from_pure(const StateVector4& psi);

    const ComplexMatrix& matrix() const { return m_; }
    double trace() const { return m_.trace().real(); }
    double min_eigenvalue() const;

private:
    explicit DensityMatrix4(const ComplexMatrix& m) : m_(m) {}
    ComplexMatrix m_;
};

// (a + a†) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& a);

namespace pauli {
ComplexMatrix identity();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
ComplexMatrix raising();  // |up><down|
ComplexMatrix lowering(); // |down><up|
} // namespace pauli

namespace kets {
Ket2 up_z();
Ket2 down_z();
Ket2 up_x();
Ket2 down_x();
Ket2 up_y();
Ket2 down_y();
} // namespace kets

// Standard tensor product of two 2x2 matrices.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
// a ⊗ 1 and 1 ⊗ b, the only places the subsystem ordering is spelled out.
ComplexMatrix on_charger(const ComplexMatrix& a);
ComplexMatrix on_battery(const ComplexMatrix& b);

struct HermitianEigen {
    int dim = 0;
    std::array<double, 4> values{}; // descending
    ComplexMatrix vectors;          // orthonormal columns, same order as values
};

// Cyclic complex Jacobi. Throws ValidationError if m is not Hermitian.
HermitianEigen hermitian_eigen(const ComplexMatrix& m);

// V diag(exp(factor * lambda)) V† for Hermitian h.
ComplexMatrix expm_hermitian_scaled(const ComplexMatrix& h, cplx factor);

// Hermitian PSD square root; eigenvalues down to -1e-6 are clamped to zero.
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

// Trace over the charger: returns rho_B.
ComplexMatrix partial_trace_charger(const ComplexMatrix& rho);
ComplexMatrix partial_trace_charger(const DensityMatrix4& rho);

} // namespace qbatt
