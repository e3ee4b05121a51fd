#pragma once

// Degree-1 Eisenstein series attached to the cusps gamma_M: numerical
// evaluation by summation over coprime bottom rows, exact cusp values, and
// the end-to-end decomposition check of the average theta series.

#include "siegel/gauss.hpp"
#include "siegel/theta.hpp"

#include <complex>
#include <map>

namespace siegel {

// E_gamma as a weighted sum of exact row-class sums S_rho,
// rho = (c, d) mod N:  E_gamma = norm * sum_rho w(rho) S_rho.
struct EisenSeries {
    Int N;
    long k = 0;
    bool zero = false;                           // flagged identically zero
    Rat norm;                                    // 1/2 if N > 2, else 1
    std::map<std::pair<long, long>, int> weight; // row class -> +-1
};

// Series attached to gamma_M (n = 1, M scalar), character chi_L of Q.
EisenSeries eisenstein_series(const SymIntMat& Q, const Int& N, long k, const Int& M);

// Shared truncated class sums S_rho(tau) = sum over coprime (c, d) = rho mod
// N with max(|c|, |d|) <= radius of (c tau + d)^{-k}, one pass for all rho.
struct ClassSums {
    long N = 1, k = 0, radius = 0;
    std::complex<double> tau;
    std::vector<std::complex<double>> S; // index (c mod N) * N + (d mod N)
};

ClassSums class_sums(const Int& N, long k, std::complex<double> tau, long radius);

// E*(tau) truncated: the (0, 1) class sum.
std::complex<double> estar_eval(const Int& N, long k, std::complex<double> tau,
                                long radius);

std::complex<double> eisenstein_eval(const EisenSeries& E, const ClassSums& cs);

// E_gamma | alpha for any alpha in SL_2(Z): exact row transport, then the
// same truncated class sums.
std::complex<double> eisenstein_eval_slashed(const EisenSeries& E, const ClassSums& cs,
                                             const IMat& alpha);

// Exact value lim_{tau -> i inf} E_gamma(tau) | alpha^{-1} (Prop.-style
// orthogonality): norm * (w((0,1) alpha) + (-1)^k w((0,-1) alpha)).
Rat eisenstein_cusp_value(const EisenSeries& E, const IMat& alpha);

struct TheoremReport {
    Int N;
    long k = 0;
    struct Coeff {
        SymIntMat M;
        AlgebraicValue formula;
        ExactCoeff exact;
        bool agree = false;
    };
    std::vector<Coeff> coeffs;
    struct Sample {
        std::complex<double> tau, lhs, rhs;
        double residual = 0;
    };
    std::vector<Sample> samples;
    double max_residual = 0;
    bool discrepancy_free = true;
};

// n = 1 end-to-end check: theta(Q; tau) against
// kappa * sum_M a_exact(L, M) E_{gamma_M}(tau) over the reduced M.
TheoremReport verify_theorem_n1(const SymIntMat& Q,
                                const std::vector<std::complex<double>>& taus,
                                long radius, long bound);

} // namespace siegel
