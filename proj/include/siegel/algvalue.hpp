#pragma once

// Exact algebraic values of the form  r * zeta8^z * prod_q q^{e_q/2}
// with r rational, z in {0..3} (zeta8 = e^{i pi/4}) and e_q odd integers.
// Closed under multiplication; this is where Gauss-sum values and the
// coefficients a_q(L, M) live.

#include "siegel/numeric.hpp"

#include <json.hpp>

#include <complex>
#include <map>

namespace siegel {

struct AlgebraicValue {
    Rat r;                    // rational part (carries the sign)
    int z = 0;                // power of zeta8, canonical in {0,1,2,3}
    std::map<Int, long> half; // prime -> odd exponent of q^{1/2}

    AlgebraicValue() : r(0) {}
    explicit AlgebraicValue(const Rat& rat) : r(rat) { canon(); }
    explicit AlgebraicValue(long v) : r(v) {}

    static AlgebraicValue i();           // i = zeta8^2
    static AlgebraicValue zeta8();
    // q^{k/2} for prime q (k may be negative).
    static AlgebraicValue half_power(const Int& q, long k);

    bool is_zero() const { return r == 0; }
    bool is_rational() const { return z == 0 && half.empty(); }

    AlgebraicValue operator*(const AlgebraicValue& o) const;
    AlgebraicValue& operator*=(const AlgebraicValue& o) { return *this = *this * o; }
    AlgebraicValue pow(long k) const; // k >= 0
    bool operator==(const AlgebraicValue& o) const = default;

    std::complex<double> embed() const;

  private:
    void canon();
};

// JSON: {"rational": [num, den], "i_power": a, "one_plus_i": bool,
//        "half_powers": {"q": e_q, ...}, "complex": [re, im]}.
// When one_plus_i is set the value is r * (1+i) * i^a * prod q^{e_q/2}
// (the zeta8 factor rewritten with its sqrt(2) absorbed).
nlohmann::json to_json(const AlgebraicValue& v);

} // namespace siegel
