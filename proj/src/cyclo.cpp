#include "siegel/cyclo.hpp"

#include <cmath>
#include <map>
#include <numeric>

namespace siegel {

namespace {

// Exact division of a by b (monic-leading b), both coefficient vectors
// ascending; returns the remainder.
std::vector<Int> poly_rem(std::vector<Int> a, const std::vector<Int>& b) {
    long db = long(b.size()) - 1;
    if (b.back() != 1) throw std::logic_error("poly_rem: divisor not monic");
    while (long(a.size()) - 1 >= db) {
        Int lead = a.back();
        long shift = long(a.size()) - 1 - db;
        if (lead != 0)
            for (long i = 0; i <= db; ++i) a[size_t(shift + i)] -= lead * b[size_t(i)];
        a.pop_back();
    }
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

// Exact quotient a / b with zero remainder required.
std::vector<Int> poly_div_exact(std::vector<Int> a, const std::vector<Int>& b) {
    long db = long(b.size()) - 1;
    if (long(a.size()) - 1 < db) throw std::logic_error("poly_div_exact: degree");
    std::vector<Int> q(a.size() - b.size() + 1, Int(0));
    while (long(a.size()) - 1 >= db) {
        Int lead = a.back();
        if (b.back() != 1) {
            if (lead % b.back() != 0) throw std::logic_error("poly_div_exact: not exact");
            lead /= b.back();
        }
        long shift = long(a.size()) - 1 - db;
        q[size_t(shift)] = lead;
        for (long i = 0; i <= db; ++i) a[size_t(shift + i)] -= lead * b[size_t(i)];
        if (a.back() != 0) throw std::logic_error("poly_div_exact: not exact");
        a.pop_back();
    }
    for (auto& v : a)
        if (v != 0) throw std::logic_error("poly_div_exact: nonzero remainder");
    return q;
}

} // namespace

std::vector<Int> cyclotomic_poly(long n) {
    static std::map<long, std::vector<Int>> memo;
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    // x^n - 1 divided by Phi_d for all proper divisors d of n.
    std::vector<Int> num(size_t(n) + 1, Int(0));
    num[0] = -1;
    num[size_t(n)] = 1;
    for (long d = 1; d < n; ++d)
        if (n % d == 0) num = poly_div_exact(num, cyclotomic_poly(d));
    memo[n] = num;
    return num;
}

CycloSum CycloSum::operator*(const CycloSum& o) const {
    if (n != o.n) throw std::invalid_argument("CycloSum: order mismatch");
    CycloSum s(n);
    for (long i = 0; i < n; ++i) {
        if (c[size_t(i)] == 0) continue;
        for (long j = 0; j < n; ++j) {
            if (o.c[size_t(j)] == 0) continue;
            s.c[size_t((i + j) % n)] += c[size_t(i)] * o.c[size_t(j)];
        }
    }
    return s;
}

CycloSum CycloSum::scaled(const Int& v) const {
    CycloSum s = *this;
    for (auto& x : s.c) x *= v;
    return s;
}

std::vector<Int> CycloSum::canonical() const {
    static std::map<long, std::vector<Int>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, cyclotomic_poly(n)).first;
    std::vector<Int> a = c;
    while (!a.empty() && a.back() == 0) a.pop_back();
    a = poly_rem(std::move(a), it->second);
    a.resize(it->second.size() - 1, Int(0));
    return a;
}

std::complex<double> CycloSum::embed() const {
    std::complex<double> s(0.0, 0.0);
    for (long k = 0; k < n; ++k)
        if (c[size_t(k)] != 0)
            s += c[size_t(k)].get_d() *
                 std::exp(std::complex<double>(0.0, 2.0 * M_PI * k / n));
    return s;
}

bool cyclo_equal(const CycloSum& a, const CycloSum& b) {
    long l = std::lcm(a.n, b.n);
    CycloSum A(l), B(l);
    for (long k = 0; k < a.n; ++k) A.c[size_t(k * (l / a.n))] = a.c[size_t(k)];
    for (long k = 0; k < b.n; ++k) B.c[size_t(k * (l / b.n))] = b.c[size_t(k)];
    return A.canonical() == B.canonical();
}

} // namespace siegel
