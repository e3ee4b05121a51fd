#pragma once

// Strong-approximation lifts: SL_n(Z/M) -> SL_n(Z) and lifts of
// block-upper-triangular symplectic targets mod N into Sp_n(Z).

#include "siegel/matrix.hpp"

namespace siegel {

// Integer matrix of determinant exactly 1 congruent to every target modulo
// its modulus (moduli pairwise coprime).  Throws std::domain_error on
// inconsistent congruences (joint determinant not == 1).
IMat lift_special(const std::vector<ModMatrix>& targets);
IMat lift_special(const ModMatrix& target);

// Same but allowing joint determinant -1 as well (result has det +-1).
IMat lift_unimodular(const std::vector<ModMatrix>& targets);

// Given A, B, D mod N with [[A,B],[0,D]] symplectic mod N, produce an
// integral symplectic 2n x 2n matrix congruent to it mod N.  The result's
// C block is == 0 mod N, i.e. the lift lies in Gamma_0(N).
IMat sp_lift_gamma0(const Int& N, const IMat& Abar, const IMat& Bbar, const IMat& Dbar);

} // namespace siegel
