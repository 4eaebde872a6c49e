#pragma once

#include <cmath>
#include <random>

#include "qbatt/qmath.hpp"

namespace testing {

using qbatt::ComplexMatrix;
using qbatt::cplx;

inline cplx random_cplx(std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

inline ComplexMatrix random_matrix(std::mt19937_64& rng, int dim)
{
    ComplexMatrix m(dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            m(r, c) = random_cplx(rng);
        }
    }
    return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, int dim)
{
    return qbatt::hermitian_part(random_matrix(rng, dim));
}

inline qbatt::StateVector4 random_state(std::mt19937_64& rng)
{
    return qbatt::StateVector4(random_cplx(rng), random_cplx(rng), random_cplx(rng), random_cplx(rng)).normalized();
}

// Full-rank Ginibre state G G† / tr.
inline ComplexMatrix random_density(std::mt19937_64& rng, int dim)
{
    const ComplexMatrix g = random_matrix(rng, dim);
    ComplexMatrix rho = g * g.adjoint();
    rho *= 1.0 / rho.trace().real();
    return qbatt::hermitian_part(rho);
}

// Random pure state mixed with Ginibre noise of weight 0..0.8, so that both
// entangled and separable states appear.
inline ComplexMatrix random_noisy_pure(std::mt19937_64& rng)
{
    const qbatt::StateVector4 v = random_state(rng);
    const double mix = std::uniform_real_distribution<double>(0.2, 1.0)(rng);
    return qbatt::hermitian_part(outer(v, v) * cplx(mix) + random_density(rng, 4) * cplx(1.0 - mix));
}

// Truncated Taylor series of exp(a).
inline ComplexMatrix taylor_exp(const ComplexMatrix& a, int terms)
{
    ComplexMatrix sum = ComplexMatrix::identity(a.dim());
    ComplexMatrix term = ComplexMatrix::identity(a.dim());
    for (int k = 1; k < terms; ++k) {
        term = term * a;
        term *= 1.0 / k;
        sum += term;
    }
    return sum;
}

// Least-squares slope of log(y) against log(x).
template <class V>
double loglog_slope(const V& x, const V& y)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace testing
