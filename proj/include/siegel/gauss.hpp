#pragma once

// Generalized Gauss sums G_{J,M}(q^h) -- brute force over x in Z^{r,d} mod
// q^h and closed forms -- plus the local coefficients a_q(L, M) and their
// product a(L, M), in both formula (closed-form) and exact (character-sum)
// modes.

#include "siegel/algvalue.hpp"
#include "siegel/cusps.hpp"
#include "siegel/cyclo.hpp"
#include "siegel/localforms.hpp"

namespace siegel {

struct BruteGauss {
    CycloSum sum;  // exact accumulator on 2q^h-th roots of unity
    std::complex<double> value;
};

// Sum over x in Z^{r,d} mod q^h of exp(pi i Tr(txJx M)/q^h).  Requires J, M
// invertible mod q, 2 | J when q odd, and q^{h r d} <= 2^24.
BruteGauss gauss_sum_brute(const SymIntMat& J, const SymIntMat& M, const Int& q,
                           long h);

// (a|q) times the classical Gauss sum G_1(q) (= sqrt(q) for q = 1 mod 4,
// i sqrt(q) for q = 3 mod 4).  q odd prime, q does not divide a.
AlgebraicValue classical_gauss(const Int& a, const Int& q);

// Closed form at h = 1, q odd: J even integral; value
// ((det J / 2^r)|q)^d (det M|q)^r G_1(q)^{rd}.
AlgebraicValue gauss_sum_closed_odd(const SymIntMat& J, const SymIntMat& M,
                                    const Int& q);

// Closed form at h = 1, q = 2: J, M odd determinant.
AlgebraicValue gauss_sum_closed_dyadic(const SymIntMat& J, const SymIntMat& M);

// Closed form at any h >= 1 via the modulus reduction
// G(q^h) = q^{rd} G(q^{h-2}).
AlgebraicValue gauss_sum_reduce(const SymIntMat& J, const SymIntMat& M,
                                const Int& q, long h);

// Exact coefficient value sum / den.
struct ExactCoeff {
    CycloSum sum;
    Int den = 1;

    std::complex<double> embed() const { return sum.embed() / den.get_d(); }
    bool is_rational() const;
    Rat rational() const;  // throws std::domain_error if not rational
};

// Closed-form local coefficient from the Jordan splitting of Q and the cusp
// profile of M at the same prime power.
AlgebraicValue a_q_formula(const JordanSplitting& SQ, const CuspPrimeProfile& PM);

// Authoritative local coefficient: the normalized character sum
// q^{-emn} sum_{V mod q^e} e{N^2 Q^{-1}(V) M / q^{2e}}.
ExactCoeff a_q_exact(const SymIntMat& Q, const SymIntMat& M, const Int& q, long e,
                     const Int& N);

// Product over q | N, closed-form mode (uses the cusp profiles in rep).
AlgebraicValue a_total_formula(const SymIntMat& Q, const CuspRep& rep);

// Authoritative global coefficient N^{-mn} sum_{U mod N} e{Q^{-1}(U) M}.
ExactCoeff a_total_exact(const SymIntMat& Q, const SymIntMat& M, const Int& N);

// 1 if N > 2, else 1/2.
Rat kappa(const Int& N);

} // namespace siegel
