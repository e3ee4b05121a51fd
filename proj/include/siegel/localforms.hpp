#pragma once

// Level, character, and q-adic Jordan normal forms of symmetric integral
// matrices, with exact determinant-1 witnesses.

#include "siegel/matrix.hpp"

namespace siegel {

struct JordanBlock {
    long scale = 0;   // block sits at q^scale
    SymIntMat J;      // unit block (invertible mod q), canonical shape
};

struct JordanSplitting {
    Int q;
    long e = 0;
    Int precision;                  // q^{e+2}
    std::vector<JordanBlock> blocks; // ascending scale, only nonempty blocks
    IMat G;                         // det 1, tG*S*G == assembled mod precision
    long zero_size = 0;             // coordinates pushed past the max scale
                                    // (cusp mode only; 0 for full splittings)

    SymIntMat assembled() const;    // J_0 perp q J_1 perp ... (zero block last)
    std::vector<long> sizes() const; // r_0..r_e (plus trailing zero block)
    int dim() const;
};

// Smallest N >= 1 with N * Q^{-1} even integral.  Q even integral, nonsingular.
Int level(const SymIntMat& Q);

// chi_L(d) = kronecker((-1)^k det Q, |d|) * sgn(d)^k, m = 2k.
int character(const SymIntMat& Q, const Int& d);

// Jordan splitting of S mod q^{e+2} (internal guard precision q^{e+4}).
JordanSplitting jordan_split(const SymIntMat& S, const Int& q, long e);

// Variant used by the cusp machinery: coordinates whose diagonalized entries
// vanish mod q^e are collected into a trailing zero block at scale e instead
// of being forced into a unit block.
JordanSplitting jordan_split_cusp(const SymIntMat& M, const Int& q, long e);

// Even integral J of even size and odd determinant: true iff J is equivalent
// to a sum of hyperbolic planes mod 4 (equivalently (-1)^{r/2} det J == 1 mod 8).
bool is_hyperbolic_mod4(const SymIntMat& J);

} // namespace siegel
