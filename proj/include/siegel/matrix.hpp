#pragma once

// Dense exact integer matrices: general (IMat) and symmetric (SymIntMat).

#include "siegel/numeric.hpp"

#include <json.hpp>

#include <initializer_list>

namespace siegel {

struct IMat {
    int rows = 0, cols = 0;
    std::vector<Int> e; // row-major

    IMat() = default;
    IMat(int r, int c) : rows(r), cols(c), e(size_t(r) * c, Int(0)) {}
    static IMat identity(int n);

    Int& at(int i, int j) { return e[size_t(i) * cols + j]; }
    const Int& at(int i, int j) const { return e[size_t(i) * cols + j]; }

    IMat transpose() const;
    IMat operator*(const IMat& o) const;
    IMat operator+(const IMat& o) const;
    IMat operator-(const IMat& o) const;
    bool operator==(const IMat& o) const = default;

    IMat reduced(const Int& m) const;      // entrywise canonical residues
    bool congruent(const IMat& o, const Int& m) const;
    bool is_identity() const;

    Int det() const;                        // exact (Bareiss)
    // Inverse mod m; throws std::domain_error if det not invertible mod m.
    IMat inv_mod(const Int& m) const;
};

struct SymIntMat {
    int n = 0;
    std::vector<Int> e; // row-major n*n, kept symmetric

    SymIntMat() = default;
    explicit SymIntMat(int dim) : n(dim), e(size_t(dim) * dim, Int(0)) {}
    SymIntMat(int dim, std::initializer_list<long> vals);
    static SymIntMat from_imat(const IMat& m); // validates symmetry

    Int& at(int i, int j) { return e[size_t(i) * n + j]; }
    const Int& at(int i, int j) const { return e[size_t(i) * n + j]; }
    void set(int i, int j, const Int& v) { at(i, j) = v; at(j, i) = v; }

    IMat as_imat() const;
    bool operator==(const SymIntMat& o) const = default;
    SymIntMat reduced(const Int& m) const;
    bool congruent(const SymIntMat& o, const Int& m) const;
    bool is_symmetric() const;

    Int det() const;
    // Q^{-1} as (numerator matrix, common denominator) with den = det.
    std::pair<SymIntMat, Int> inverse_times_det() const;

    // t(G) * this * G
    SymIntMat conj(const IMat& g) const;

    // Direct sum.
    SymIntMat dsum(const SymIntMat& o) const;
    SymIntMat scaled(const Int& c) const;
};

bool is_even_integral(const SymIntMat& s);

// JSON: {"n": dim, "entries": [[...], ...]}; entries may be numbers or
// decimal strings (round-trip safe for arbitrary precision).
nlohmann::json to_json(const IMat& m);
nlohmann::json to_json(const SymIntMat& m);
IMat imat_from_json(const nlohmann::json& j);
SymIntMat symmat_from_json(const nlohmann::json& j);

// Matrix with explicit modulus; entries always canonical residues.
struct ModMatrix {
    Int m = 2;
    IMat a;

    ModMatrix() = default;
    ModMatrix(const Int& modulus, const IMat& mat) : m(modulus), a(mat.reduced(modulus)) {
        if (modulus < 2) throw std::invalid_argument("ModMatrix: modulus must be >= 2");
    }
    ModMatrix operator*(const ModMatrix& o) const {
        if (m != o.m) throw std::invalid_argument("ModMatrix: modulus mismatch");
        return ModMatrix(m, a * o.a);
    }
    bool operator==(const ModMatrix& o) const = default;
};

// Entrywise CRT of equally-sized matrices; throws "moduli not coprime".
ModMatrix crt_combine(const std::vector<ModMatrix>& parts);
Int crt_combine_int(const std::vector<std::pair<Int, Int>>& parts); // (value, modulus)

} // namespace siegel
