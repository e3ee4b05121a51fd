#pragma once

// Reduced and partially reduced representatives gamma_M for the
// zero-dimensional cusps Gamma_inf \ Sp_n(Z) / Gamma_0(N): literal
// definition tests, complete enumeration, and the constructive reduction
// with exact matrix witnesses.

#include "siegel/matrix.hpp"

#include <string>
#include <vector>

namespace siegel {

// Local (one prime) data of a cusp representative.
struct CuspPrimeProfile {
    Int q;
    long e = 0;
    std::vector<int> d;  // block sizes d_0..d_e (scale e = zero block)
    SymIntMat local;     // canonical local matrix mod q^e
};

struct CuspRep {
    int n = 0;
    Int N;
    SymIntMat M;  // canonical mod N, entries in [0, N)
    std::vector<CuspPrimeProfile> profile;
    bool partial = false;  // 2-part only partially reduced (8 | N, n > 1)
};

// Literal test of the reduced-representative definitions (per prime power
// q^e || N; all parts must pass).  If reason != nullptr a failure
// explanation is stored.  For 8 | N with n > 1 the dyadic part has no fully
// reduced form; throws "use partially reduced test for 2-part".
bool is_reduced(const SymIntMat& M, int n, const Int& N, std::string* reason = nullptr);

// Partially reduced dyadic representative test (n > 1, e >= 3).
bool is_partially_reduced_dyadic(const SymIntMat& M, int n, long e,
                                 std::string* reason = nullptr);

// All reduced representatives mod N, deterministic order (per prime: block
// size profiles lexicographically, largest d_0 first, then unit data).  For
// 8 | N with n > 1 the dyadic part uses the partially reduced family and the
// list is a (possibly redundant) superset of a complete set.
std::vector<CuspRep> enumerate_reduced(int n, const Int& N);

// Collapse oracle-equivalent entries (needs the brute-force double coset
// oracle; throws "oracle scale exceeded" beyond its range).
std::vector<CuspRep> dedupe_reduced(const std::vector<CuspRep>& reps);

struct CuspReduction {
    CuspRep rep;
    IMat G;     // integral, det +-1
    IMat beta;  // integral symplectic, in Gamma_0(N)
};

// Constructive reduction of gamma_{M_in}: returns the reduced (or partially
// reduced) representative together with exact witnesses satisfying
//   G (M_in  I) beta == (M_out  I)  mod N.
// The identity is verified internally before returning.
CuspReduction reduce_cusp(const SymIntMat& M_in, int n, const Int& N);

} // namespace siegel
