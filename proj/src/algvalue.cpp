#include "siegel/algvalue.hpp"

#include <cmath>

namespace siegel {

void AlgebraicValue::canon() {
    if (r == 0) {
        z = 0;
        half.clear();
        return;
    }
    // zeta8^4 = -1 folds into the rational sign.
    z = ((z % 8) + 8) % 8;
    if (z >= 4) {
        z -= 4;
        r = -r;
    }
    // Even half-exponents fold into the rational part.
    for (auto it = half.begin(); it != half.end();) {
        long e = it->second;
        long fold = (e >= 0) ? e / 2 : -((-e + 1) / 2);
        if (fold != 0) {
            Int p;
            mpz_pow_ui(p.get_mpz_t(), it->first.get_mpz_t(),
                       static_cast<unsigned long>(fold >= 0 ? fold : -fold));
            if (fold > 0)
                r *= Rat(p);
            else
                r /= Rat(p);
            it->second = e - 2 * fold;
        }
        if (it->second == 0)
            it = half.erase(it);
        else
            ++it;
    }
}

AlgebraicValue AlgebraicValue::i() {
    AlgebraicValue v(Rat(1));
    v.z = 2;
    return v;
}

AlgebraicValue AlgebraicValue::zeta8() {
    AlgebraicValue v(Rat(1));
    v.z = 1;
    return v;
}

AlgebraicValue AlgebraicValue::half_power(const Int& q, long k) {
    AlgebraicValue v(Rat(1));
    v.half[q] = k;
    v.canon();
    return v;
}

AlgebraicValue AlgebraicValue::operator*(const AlgebraicValue& o) const {
    AlgebraicValue v;
    v.r = r * o.r;
    v.z = z + o.z;
    v.half = half;
    for (auto& [q, e] : o.half) v.half[q] += e;
    v.canon();
    return v;
}

AlgebraicValue AlgebraicValue::pow(long k) const {
    if (k < 0) throw std::invalid_argument("AlgebraicValue::pow: negative exponent");
    AlgebraicValue v(Rat(1));
    for (long t = 0; t < k; ++t) v *= *this;
    return v;
}

std::complex<double> AlgebraicValue::embed() const {
    double mag = to_double(r);
    for (auto& [q, e] : half) mag *= std::pow(q.get_d(), 0.5 * double(e));
    return mag * std::exp(std::complex<double>(0.0, M_PI * z / 4.0));
}

nlohmann::json to_json(const AlgebraicValue& v) {
    nlohmann::json j;
    Rat r = v.r;
    auto half = v.half;
    bool opi = (v.z % 2) != 0;
    int ipow = opi ? (v.z - 1) / 2 : v.z / 2;
    if (opi) half[2] -= 1; // zeta8 = (1+i) * 2^{-1/2}
    j["rational"] = {r.get_num().get_str(), r.get_den().get_str()};
    j["i_power"] = ipow;
    j["one_plus_i"] = opi;
    nlohmann::json hp = nlohmann::json::object();
    for (auto& [q, e] : half)
        if (e != 0) hp[q.get_str()] = e;
    j["half_powers"] = hp;
    auto c = v.embed();
    j["complex"] = {c.real(), c.imag()};
    return j;
}

} // namespace siegel
