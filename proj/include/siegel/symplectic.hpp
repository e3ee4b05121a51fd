#pragma once

// Symplectic matrices over Z and Z/N, and brute-force enumeration oracles
// for double cosets Gamma_inf \ Sp_n(Z/N) / Gamma_0-bar.

#include "siegel/matrix.hpp"

#include <cstdint>

namespace siegel {

// g is 2n x 2n integral: A tB symmetric, C tD symmetric, A tD - B tC = I.
bool is_symplectic(const IMat& g);

// g symplectic and C == 0 mod N.
bool in_gamma0(const IMat& g, const Int& N);

// gamma_M = [[I,0],[M,I]] for symmetric M.
IMat gamma_of(const SymIntMat& M);

// Brute-force oracle over Sp_n(Z/N).  n = 1 (N <= ~50) or n = 2 (N <= 5);
// the group order must not exceed the cap (default 10^7, overridable via the
// SIEGEL_ORACLE_CAP environment variable), else "oracle scale exceeded".
class SpOracle {
  public:
    SpOracle(int n, long N);

    int n() const { return n_; }
    long N() const { return N_; }
    size_t group_order() const { return elems_.size(); }

    // Number of orbits of (left Gamma_inf-bar) x (right Gamma_0-bar), where
    // Gamma_inf-bar = {C=0, det A == +-1} and Gamma_0-bar = {C=0}.
    int double_coset_count();

    // Same double coset for gamma_{M1} and gamma_{M2}?
    bool equivalent(const SymIntMat& M1, const SymIntMat& M2);

    // One representative gamma-block matrix per double coset (the first
    // element of each orbit in enumeration order).
    std::vector<IMat> orbit_reps();

    // Coset id of an arbitrary element of Sp_n(Z/N).
    int coset_of(const IMat& g);

    // Decoded element list access (for exhaustive property tests).
    IMat element(size_t i) const;

  private:
    int n_, dim_, bits_;
    long N_;
    std::vector<uint64_t> elems_; // sorted packed elements
    std::vector<int32_t> coset_;  // orbit id per element (after fill)
    std::vector<uint8_t> mod_tab_;  // small-sum reduction table
    std::vector<uint64_t> idx_key_; // open-addressing index into elems_
    std::vector<uint32_t> idx_val_;
    size_t idx_mask_ = 0;
    int ncosets_ = -1;

    void build_index();

    uint64_t pack(const IMat& g) const;
    IMat unpack(uint64_t v) const;
    uint64_t mul(uint64_t a, uint64_t b) const;
    size_t index_of(uint64_t v) const;
    std::vector<uint64_t> sp_generators() const;
    std::vector<uint64_t> parabolic_generators(bool det_pm1) const;
    void fill_cosets();
};

} // namespace siegel
