#include "siegel/eisen.hpp"

#include "siegel/localforms.hpp"

#include <cmath>
#include <numeric>

namespace siegel {

namespace {

std::pair<long, long> row_mod(long c, long d, long N) {
    return {((c % N) + N) % N, ((d % N) + N) % N};
}

} // namespace

EisenSeries eisenstein_series(const SymIntMat& Q, const Int& N, long k, const Int& M) {
    EisenSeries E;
    E.N = N;
    E.k = k;
    E.norm = (N > 2) ? Rat(1, 2) : Rat(1);
    long Nl = N.get_si();
    // Parity: chi(-1) must equal (-1)^k.
    int chim1 = character(Q, -1);
    if (chim1 != ((k % 2 == 0) ? 1 : -1)) {
        E.zero = true;
        return E;
    }
    long Mv = mod_reduce(M, N).get_si();
    // Orbit of (M, 1) under [[a, b], [0, a^{-1}]] mod N, weight chi(a).
    for (long a = 0; a < Nl; ++a) {
        if (std::gcd(a, Nl) != 1) continue;
        int w = character(Q, a);
        long ainv = mod_inv(a, N).get_si();
        for (long b = 0; b < Nl; ++b) {
            auto rho = row_mod(Mv * a, Mv * b + ainv, Nl);
            auto it = E.weight.find(rho);
            if (it == E.weight.end())
                E.weight[rho] = w;
            else if (it->second != w) {
                // Character non-trivial on the stabilizer: series vanishes.
                E.zero = true;
                E.weight.clear();
                return E;
            }
        }
    }
    return E;
}

ClassSums class_sums(const Int& N, long k, std::complex<double> tau, long radius) {
    ClassSums cs;
    cs.N = N.get_si();
    cs.k = k;
    cs.radius = radius;
    cs.tau = tau;
    cs.S.assign(size_t(cs.N) * cs.N, {0.0, 0.0});
    // Shells of increasing max(|c|, |d|) for deterministic truncation.
    for (long shell = 0; shell <= radius; ++shell) {
        auto visit = [&](long c, long d) {
            if (std::gcd(std::abs(c), std::abs(d)) != 1) return;
            std::complex<double> z = double(c) * tau + double(d);
            std::complex<double> p = 1.0;
            for (long t = 0; t < k; ++t) p *= z;
            auto rho = row_mod(c, d, cs.N);
            cs.S[size_t(rho.first) * cs.N + rho.second] += 1.0 / p;
        };
        if (shell == 0) continue; // (0, 0) is not coprime
        for (long d = -shell; d <= shell; ++d) {
            visit(shell, d);
            visit(-shell, d);
        }
        for (long c = -shell + 1; c <= shell - 1; ++c) {
            visit(c, shell);
            visit(c, -shell);
        }
    }
    return cs;
}

std::complex<double> estar_eval(const Int& N, long k, std::complex<double> tau,
                                long radius) {
    auto cs = class_sums(N, k, tau, radius);
    return cs.S[size_t(0) * cs.N + (1 % cs.N)];
}

std::complex<double> eisenstein_eval(const EisenSeries& E, const ClassSums& cs) {
    if (E.zero) return 0.0;
    if (cs.N != E.N.get_si() || cs.k != E.k)
        throw std::invalid_argument("eisenstein_eval: class-sum table mismatch");
    std::complex<double> s = 0.0;
    for (auto& [rho, w] : E.weight)
        s += double(w) * cs.S[size_t(rho.first) * cs.N + rho.second];
    return to_double(E.norm) * s;
}

std::complex<double> eisenstein_eval_slashed(const EisenSeries& E, const ClassSums& cs,
                                             const IMat& alpha) {
    if (E.zero) return 0.0;
    if (alpha.rows != 2 || alpha.cols != 2 || alpha.det() != 1)
        throw std::invalid_argument("eisenstein_eval_slashed: alpha must be in SL2(Z)");
    std::complex<double> s = 0.0;
    long N = cs.N;
    long a = mod_reduce(alpha.at(0, 0), N).get_si(), b = mod_reduce(alpha.at(0, 1), N).get_si();
    long c = mod_reduce(alpha.at(1, 0), N).get_si(), d = mod_reduce(alpha.at(1, 1), N).get_si();
    for (auto& [rho, w] : E.weight) {
        long rc = (rho.first * a + rho.second * c) % N;
        long rd = (rho.first * b + rho.second * d) % N;
        s += double(w) * cs.S[size_t(rc) * N + rd];
    }
    return to_double(E.norm) * s;
}

Rat eisenstein_cusp_value(const EisenSeries& E, const IMat& alpha) {
    if (E.zero) return Rat(0);
    if (alpha.rows != 2 || alpha.cols != 2 || alpha.det() != 1)
        throw std::invalid_argument("eisenstein_cusp_value: alpha must be in SL2(Z)");
    long N = E.N.get_si();
    auto w_of = [&](long c, long d) -> int {
        auto it = E.weight.find(row_mod(c, d, N));
        return it == E.weight.end() ? 0 : it->second;
    };
    // Rows (0, 1) alpha and (0, -1) alpha.
    long c1 = alpha.at(1, 0).get_si(), d1 = alpha.at(1, 1).get_si();
    int w1 = w_of(c1, d1);
    int w2 = w_of(-c1, -d1);
    int sgn = (E.k % 2 == 0) ? 1 : -1;
    return E.norm * Rat(w1 + sgn * w2);
}

TheoremReport verify_theorem_n1(const SymIntMat& Q,
                                const std::vector<std::complex<double>>& taus,
                                long radius, long bound) {
    TheoremReport rep;
    rep.N = level(Q);
    if (Q.n % 2 != 0) throw std::invalid_argument("verify_theorem_n1: odd rank");
    rep.k = Q.n / 2;
    auto reps = enumerate_reduced(1, rep.N);
    std::vector<EisenSeries> series;
    for (auto& r : reps) {
        TheoremReport::Coeff c;
        c.M = r.M;
        c.formula = a_total_formula(Q, r);
        c.exact = a_total_exact(Q, r.M, rep.N);
        c.agree = std::abs(c.formula.embed() - c.exact.embed()) <= 1e-9;
        if (!c.agree) rep.discrepancy_free = false;
        rep.coeffs.push_back(c);
        series.push_back(eisenstein_series(Q, rep.N, rep.k, r.M.at(0, 0)));
    }
    auto ts = theta_coeffs(Q, 1, bound);
    double kap = to_double(kappa(rep.N));
    for (auto tau : taus) {
        TheoremReport::Sample s;
        s.tau = tau;
        CMat t1(1, 1);
        t1.at(0, 0) = tau;
        s.lhs = theta_eval(ts, t1);
        auto cs = class_sums(rep.N, rep.k, tau, radius);
        s.rhs = 0.0;
        for (size_t i = 0; i < reps.size(); ++i)
            s.rhs += rep.coeffs[i].exact.embed() * eisenstein_eval(series[i], cs);
        s.rhs *= kap;
        s.residual = std::abs(s.lhs - s.rhs);
        rep.max_residual = std::max(rep.max_residual, s.residual);
        rep.samples.push_back(s);
    }
    return rep;
}

} // namespace siegel
