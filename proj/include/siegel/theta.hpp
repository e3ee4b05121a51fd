#pragma once

// Siegel theta series: exact Fourier coefficients by lattice enumeration,
// numerical evaluation on the Siegel upper half-space (n <= 2), the slash
// action, and the cusp limit via the inversion-formula route.

#include "siegel/gauss.hpp"
#include "siegel/matrix.hpp"

#include <complex>
#include <functional>
#include <map>

namespace siegel {

// Small dense complex matrix (numerics only).
struct CMat {
    int rows = 0, cols = 0;
    std::vector<std::complex<double>> e;

    CMat() = default;
    CMat(int r, int c) : rows(r), cols(c), e(size_t(r) * c) {}
    static CMat identity(int n);
    static CMat from_imat(const IMat& m);
    static CMat scaled_identity(int n, std::complex<double> v);

    std::complex<double>& at(int i, int j) { return e[size_t(i) * cols + j]; }
    const std::complex<double>& at(int i, int j) const { return e[size_t(i) * cols + j]; }

    CMat operator*(const CMat& o) const;
    CMat operator+(const CMat& o) const;
    std::complex<double> det() const;   // Gaussian elimination
    CMat inverse() const;
    CMat transpose() const;
};

// tau in H_(n): symmetric with positive definite imaginary part.
bool in_siegel_space(const CMat& tau);

struct ThetaSeries {
    SymIntMat Q;
    int n = 1;
    long bound = 0; // complete for all T with Tr(T) <= bound
    // Key: row-major entries of T (n x n, symmetric).
    std::map<std::vector<long>, Int> coeffs;
};

// Exact representation counts #{U : tU Q U = T} for Tr(T) <= bound (n <= 2).
ThetaSeries theta_coeffs(const SymIntMat& Q, int n, long bound);

// Truncated sum  sum_T coeffs[T] e{T tau}.
std::complex<double> theta_eval(const ThetaSeries& ts, const CMat& tau);

// det(C tau + D)^{-k} f((A tau + B)(C tau + D)^{-1}).
std::complex<double> slash(const std::function<std::complex<double>(const CMat&)>& f,
                           const IMat& gamma, long k, const CMat& tau);

// theta | [[I,0],[-M,I]] at tau = iY I_n via the inversion formula
// (numerically stable near the cusp); requires an orthogonal Z-splitting of
// Q of tractable component size.
std::complex<double> theta_cusp_limit_numeric(const SymIntMat& Q, const SymIntMat& M,
                                              int n, double Y);

// The exact Y = infinity value: N^{-mn} sum_{U mod N} e{Q^{-1}(U) M}.
ExactCoeff theta_cusp_limit_exact(const SymIntMat& Q, const SymIntMat& M, int n);

} // namespace siegel
