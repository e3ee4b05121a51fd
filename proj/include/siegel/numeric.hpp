#pragma once

// Exact modular arithmetic helpers on top of GMP integers.

#include <gmpxx.h>
#include <stdexcept>
#include <string>
#include <vector>

namespace siegel {

using Int = mpz_class;
using Rat = mpq_class;

// Canonical representative of a mod m in [0, m).  Requires m > 0.
Int mod_reduce(const Int& a, const Int& m);

// Representative of a mod m in (-m/2, m/2].
Int mod_reduce_sym(const Int& a, const Int& m);

// Inverse of a mod m; throws std::domain_error if gcd(a, m) != 1.
Int mod_inv(const Int& a, const Int& m);

// a^e mod m with e >= 0.
Int mod_pow(const Int& a, const Int& e, const Int& m);

// q-adic valuation of a, capped at `cap` (also returned for a == 0).
long valuation(const Int& a, const Int& q, long cap);

// Kronecker symbol (a|b), extended Jacobi symbol.
int kronecker(const Int& a, const Int& b);

// CRT: x == a1 (mod m1), x == a2 (mod m2) with gcd(m1, m2) = 1.
// Returns canonical x mod m1*m2; throws std::invalid_argument if the moduli
// are not coprime.
Int crt2(const Int& a1, const Int& m1, const Int& a2, const Int& m2);

// Square root of a mod q^k for odd prime q, gcd(a, q) = 1.  Throws
// std::domain_error when a is a non-residue mod q.
Int sqrt_mod_odd(const Int& a, const Int& q, long k);

// Square root of a mod 2^k for odd a.  Requires a == 1 (mod 8) when k >= 3,
// a == 1 (mod 4) when k == 2, odd a when k == 1; throws otherwise.
Int sqrt_mod_2pow(const Int& a, long k);

// Prime factorization (small inputs, trial division).  Pairs (p, e), p ascending.
std::vector<std::pair<Int, long>> factorize(const Int& n);

bool is_prime(const Int& n);

// Smallest positive quadratic non-residue mod odd prime q.
Int least_nonresidue(const Int& q);

double to_double(const Rat& r);

} // namespace siegel
