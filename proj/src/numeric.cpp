#include "siegel/numeric.hpp"

namespace siegel {

Int mod_reduce(const Int& a, const Int& m) {
    if (m <= 0) throw std::invalid_argument("mod_reduce: modulus must be positive");
    Int r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

Int mod_reduce_sym(const Int& a, const Int& m) {
    Int r = mod_reduce(a, m);
    if (2 * r > m) r -= m;
    return r;
}

Int mod_inv(const Int& a, const Int& m) {
    Int r;
    if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()))
        throw std::domain_error("mod_inv: element not invertible mod " + m.get_str());
    return r;
}

Int mod_pow(const Int& a, const Int& e, const Int& m) {
    if (e < 0) throw std::invalid_argument("mod_pow: negative exponent");
    Int r;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

long valuation(const Int& a, const Int& q, long cap) {
    if (a == 0) return cap;
    Int t = a;
    long v = 0;
    while (v < cap && mpz_divisible_p(t.get_mpz_t(), q.get_mpz_t())) {
        t /= q;
        ++v;
    }
    return v;
}

int kronecker(const Int& a, const Int& b) {
    return mpz_kronecker(a.get_mpz_t(), b.get_mpz_t());
}

Int crt2(const Int& a1, const Int& m1, const Int& a2, const Int& m2) {
    Int g = gcd(m1, m2);
    if (g != 1) throw std::invalid_argument("crt2: moduli not coprime");
    Int m = m1 * m2;
    // x = a1 + m1 * t with m1 * t == a2 - a1 (mod m2)
    Int t = mod_reduce((a2 - a1) * mod_inv(m1 % m2, m2), m2);
    return mod_reduce(a1 + m1 * t, m);
}

Int sqrt_mod_odd(const Int& a, const Int& q, long k) {
    Int ar = mod_reduce(a, q);
    if (ar == 0 || kronecker(ar, q) != 1)
        throw std::domain_error("sqrt_mod_odd: not a unit square mod " + q.get_str());
    // Tonelli-Shanks mod q.
    Int x;
    if (q % 4 == 3) {
        x = mod_pow(ar, (q + 1) / 4, q);
    } else {
        Int Q = q - 1;
        long s = 0;
        while (Q % 2 == 0) { Q /= 2; ++s; }
        Int z = least_nonresidue(q);
        Int c = mod_pow(z, Q, q);
        x = mod_pow(ar, (Q + 1) / 2, q);
        Int t = mod_pow(ar, Q, q);
        long m = s;
        while (t != 1) {
            Int tt = t;
            long i = 0;
            while (tt != 1) { tt = tt * tt % q; ++i; }
            Int b = c;
            for (long j = 0; j < m - i - 1; ++j) b = b * b % q;
            x = x * b % q;
            c = b * b % q;
            t = t * c % q;
            m = i;
        }
    }
    // Hensel lift x to mod q^k: x <- x - (x^2 - a) / (2x).
    Int qk = 1;
    for (long i = 0; i < k; ++i) qk *= q;
    Int cur = q;
    while (cur < qk) {
        cur = cur * cur;
        if (cur > qk) cur = qk;
        Int inv = mod_inv(2 * x % cur, cur);
        x = mod_reduce(x - (x * x - a) % cur * inv, cur);
    }
    return mod_reduce(x, qk);
}

Int sqrt_mod_2pow(const Int& a, long k) {
    Int m = Int(1) << k;
    Int ar = mod_reduce(a, m);
    if (ar % 2 == 0) throw std::domain_error("sqrt_mod_2pow: even argument");
    if (k == 1) return 1;
    if (k == 2) {
        if (ar % 4 != 1) throw std::domain_error("sqrt_mod_2pow: not 1 mod 4");
        return 1;
    }
    if (ar % 8 != 1) throw std::domain_error("sqrt_mod_2pow: not 1 mod 8");
    // x == 1 mod 8 has a root; lift 1 from mod 8 upward one bit at a time.
    Int x = 1;
    for (long j = 3; j < k; ++j) {
        Int mj1 = Int(1) << (j + 1);
        if ((x * x - ar) % mj1 != 0) x += Int(1) << (j - 1);
    }
    return mod_reduce(x, m);
}

std::vector<std::pair<Int, long>> factorize(const Int& n) {
    if (n <= 0) throw std::invalid_argument("factorize: need positive argument");
    std::vector<std::pair<Int, long>> out;
    Int m = n;
    for (Int p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
        if (m % p == 0) {
            long e = 0;
            while (m % p == 0) { m /= p; ++e; }
            out.emplace_back(p, e);
        }
    }
    if (m > 1) out.emplace_back(m, 1);
    return out;
}

bool is_prime(const Int& n) {
    return mpz_probab_prime_p(n.get_mpz_t(), 30) > 0;
}

Int least_nonresidue(const Int& q) {
    for (Int z = 2;; ++z)
        if (kronecker(z, q) == -1) return z;
}

double to_double(const Rat& r) { return r.get_d(); }

} // namespace siegel
