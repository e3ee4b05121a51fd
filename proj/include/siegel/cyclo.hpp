#pragma once

// Exact accumulators over roots of unity: integer coefficient vectors on
// zeta_n^k (zeta_n = e^{2 pi i / n}), with canonical reduction modulo the
// n-th cyclotomic polynomial for exact comparison.

#include "siegel/numeric.hpp"

#include <complex>

namespace siegel {

struct CycloSum {
    long n = 1;            // root-of-unity order
    std::vector<Int> c;    // coefficient of zeta_n^k at index k

    CycloSum() : c(1, Int(0)) {}
    explicit CycloSum(long order) : n(order), c(size_t(order), Int(0)) {
        if (order < 1) throw std::invalid_argument("CycloSum: order must be >= 1");
    }
    static CycloSum constant(long order, const Int& v) {
        CycloSum s(order);
        s.c[0] = v;
        return s;
    }

    void add(long k, const Int& v = Int(1)) { c[size_t(((k % n) + n) % n)] += v; }
    CycloSum operator*(const CycloSum& o) const; // same order; index convolution
    CycloSum scaled(const Int& v) const;

    // Coefficients reduced modulo the n-th cyclotomic polynomial
    // (degree phi(n) vector); equal sums have equal canonical forms.
    std::vector<Int> canonical() const;

    std::complex<double> embed() const;
};

// x^n - 1 divided by all lower cyclotomic factors; coefficient vector
// (degree ascending), exact.
std::vector<Int> cyclotomic_poly(long n);

// Exact equality as complex numbers (orders may differ; compared at the lcm).
bool cyclo_equal(const CycloSum& a, const CycloSum& b);

} // namespace siegel
