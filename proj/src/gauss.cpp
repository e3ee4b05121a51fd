#include "siegel/gauss.hpp"

#include <algorithm>
#include <numeric>

namespace siegel {

namespace {

Int ipow(const Int& q, long k) {
    Int p;
    mpz_pow_ui(p.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(k));
    return p;
}

bool even_integral(const SymIntMat& S) {
    for (int i = 0; i < S.n; ++i)
        if (S.at(i, i) % 2 != 0) return false;
    return true;
}

// Mod-4 classification of a symmetric S with odd determinant: either even
// integral (then hyperbolic mod 4 or not) or diagonalizable mod 4 with
// `ones` entries = 1 mod 4.
struct DyadicClass {
    int dim = 0;
    bool even = false;
    bool hyper = false;
    int ones = 0;
    long sig = 0; // sum of diagonal entries mod 8 (odd-diagonal case)
};

DyadicClass classify_dyadic(const SymIntMat& S) {
    DyadicClass c;
    c.dim = S.n;
    if (S.det() % 2 == 0) throw std::invalid_argument("gauss: even determinant");
    if (even_integral(S)) {
        c.even = true;
        c.hyper = is_hyperbolic_mod4(S);
        return c;
    }
    auto js = jordan_split(S, 2, 1); // canonical unit block mod 8
    if (js.blocks.size() != 1 || js.blocks[0].scale != 0)
        throw std::logic_error("gauss: unexpected dyadic splitting");
    const SymIntMat& J = js.blocks[0].J;
    for (int i = 0; i < J.n; ++i)
        for (int j = i + 1; j < J.n; ++j)
            if (J.at(i, j) % 8 != 0)
                throw std::logic_error("gauss: odd form not diagonalized");
    for (int i = 0; i < J.n; ++i) {
        if (mod_reduce(J.at(i, i), 4) == 1) ++c.ones;
        c.sig += mod_reduce(J.at(i, i), 8).get_si();
    }
    c.sig %= 8;
    return c;
}

// Connected components of the support graph of Q (orthogonal Z-splitting).
std::vector<std::vector<int>> components(const SymIntMat& Q) {
    int m = Q.n;
    std::vector<int> comp(size_t(m), -1);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < m; ++s) {
        if (comp[size_t(s)] >= 0) continue;
        std::vector<int> stack{s}, members;
        comp[size_t(s)] = int(out.size());
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (int w = 0; w < m; ++w)
                if (comp[size_t(w)] < 0 && Q.at(v, w) != 0) {
                    comp[size_t(w)] = int(out.size());
                    stack.push_back(w);
                }
        }
        std::sort(members.begin(), members.end());
        out.push_back(members);
    }
    return out;
}

// Character sum over V in Z^{|rows| x n} mod R of
// zeta_order^{Tr(tV B_I V M)} accumulated exactly (B restricted to `rows`).
CycloSum component_char_sum(const IMat& B, const std::vector<int>& rows,
                            const SymIntMat& M, const Int& R, long order) {
    int mc = int(rows.size()), n = M.n;
    // Scale guard.
    double logterms = double(mc) * n * std::log2(R.get_d());
    if (logterms > 24.0) throw std::runtime_error("gauss: scale exceeded");
    CycloSum acc(order);
    std::vector<Int> V(size_t(mc) * n, Int(0));
    std::vector<Int> P(size_t(n) * n); // tV B V
    while (true) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Int s = 0;
                for (int a = 0; a < mc; ++a)
                    for (int b = 0; b < mc; ++b)
                        s += V[size_t(a) * n + i] * B.at(rows[size_t(a)], rows[size_t(b)]) *
                             V[size_t(b) * n + j];
                P[size_t(i) * n + j] = s;
            }
        Int t = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) t += P[size_t(i) * n + j] * M.at(j, i);
        acc.add(mod_reduce(t, order).get_si());
        // Odometer.
        size_t k = 0;
        for (; k < V.size(); ++k) {
            V[k] += 1;
            if (V[k] < R) break;
            V[k] = 0;
        }
        if (k == V.size()) break;
    }
    return acc;
}

// B = c * Q^{-1}, required integral.
IMat scaled_inverse(const SymIntMat& Q, const Int& c) {
    auto [adj, det] = Q.inverse_times_det();
    IMat B(Q.n, Q.n);
    for (int i = 0; i < Q.n; ++i)
        for (int j = 0; j < Q.n; ++j) {
            Int num = adj.at(i, j) * c;
            if (num % det != 0) throw std::logic_error("gauss: c Q^{-1} not integral");
            B.at(i, j) = num / det;
        }
    return B;
}

} // namespace

BruteGauss gauss_sum_brute(const SymIntMat& J, const SymIntMat& M, const Int& q,
                           long h) {
    int r = J.n, d = M.n;
    if (h < 1) throw std::invalid_argument("gauss_sum_brute: h >= 1 required");
    if (J.det() % q == 0 || M.det() % q == 0)
        throw std::invalid_argument("gauss_sum_brute: J, M must be invertible mod q");
    if (q != 2 && !even_integral(J))
        throw std::invalid_argument("gauss_sum_brute: 2 | J required for odd q");
    double logterms = double(h) * r * d * std::log2(q.get_d());
    if (logterms > 24.0) throw std::runtime_error("gauss_sum_brute: scale exceeded");

    long Q = ipow(q, h).get_si();
    long order = 2 * Q;
    long rd = long(r) * d;
    std::vector<long> Jl(size_t(r) * r), Ml(size_t(d) * d);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) Jl[size_t(i) * r + j] = mod_reduce(J.at(i, j), order).get_si();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) Ml[size_t(i) * d + j] = mod_reduce(M.at(i, j), order).get_si();

    CycloSum acc(order);
    std::vector<long> x(size_t(rd), 0);   // x[a*d + i] = entry (a, i)
    std::vector<long> Jx(size_t(rd), 0);  // (J x)(a, i)
    while (true) {
        for (int a = 0; a < r; ++a)
            for (int i = 0; i < d; ++i) {
                long s = 0;
                for (int b = 0; b < r; ++b) s += Jl[size_t(a) * r + b] * x[size_t(b) * d + i];
                Jx[size_t(a) * d + i] = s % order;
            }
        long t = 0;
        // Tr(tx J x M) = sum_{i,j} (tx Jx)_{ij} M_{ji}.
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                long p = 0;
                for (int a = 0; a < r; ++a) p += x[size_t(a) * d + i] * Jx[size_t(a) * d + j];
                t = (t + (p % order) * Ml[size_t(j) * d + i]) % order;
            }
        acc.add(((t % order) + order) % order);
        size_t k = 0;
        for (; k < x.size(); ++k) {
            if (++x[k] < Q) break;
            x[k] = 0;
        }
        if (k == x.size()) break;
    }
    return {acc, acc.embed()};
}

AlgebraicValue classical_gauss(const Int& a, const Int& q) {
    if (q == 2 || q % 2 == 0) throw std::invalid_argument("classical_gauss: q must be odd");
    if (a % q == 0) throw std::invalid_argument("classical_gauss: q | a");
    AlgebraicValue g1 = AlgebraicValue::half_power(q, 1);
    if (mod_reduce(q, 4) == 3) g1 *= AlgebraicValue::i();
    return AlgebraicValue(Rat(kronecker(a, q))) * g1;
}

AlgebraicValue gauss_sum_closed_odd(const SymIntMat& J, const SymIntMat& M,
                                    const Int& q) {
    int r = J.n, d = M.n;
    if (r == 0 || d == 0) return AlgebraicValue(1);
    if (!even_integral(J))
        throw std::invalid_argument("gauss_sum_closed_odd: J must be even integral");
    Int dj = J.det(), dm = M.det();
    if (dj % q == 0 || dm % q == 0)
        throw std::invalid_argument("gauss_sum_closed_odd: not invertible mod q");
    // Legendre symbol of det(J)/2^r (the unit nu of 2<1,...,1,nu>).
    Int nu = mod_reduce(dj * mod_inv(ipow(2, r), q), q);
    int lj = kronecker(nu, q);
    int lm = kronecker(mod_reduce(dm, q), q);
    AlgebraicValue v(Rat((d % 2 ? lj : 1) * (r % 2 ? lm : 1)));
    return v * classical_gauss(1, q).pow(long(r) * d);
}

AlgebraicValue gauss_sum_closed_dyadic(const SymIntMat& J, const SymIntMat& M) {
    int r = J.n, d = M.n;
    if (r == 0 || d == 0) return AlgebraicValue(1);
    DyadicClass cj = classify_dyadic(J), cm = classify_dyadic(M);
    long rd = long(r) * d;
    AlgebraicValue base = AlgebraicValue::half_power(2, rd);
    if (cj.even && cm.even) return base;
    if (cj.even || cm.even) {
        const DyadicClass& ev = cj.even ? cj : cm;
        const DyadicClass& od = cj.even ? cm : cj;
        if (ev.hyper) return base;
        // One sign per odd-diagonal entry (the non-hyperbolic A-block sum).
        return (od.dim % 2) ? base * AlgebraicValue(Rat(-1)) : base;
    }
    // Both odd diagonal: 2^{rd/2} zeta8^{(2r'-r)(2d'-d)}.
    long s = (2L * cj.ones - r) * (2L * cm.ones - d);
    AlgebraicValue z8 = AlgebraicValue::zeta8();
    long sm = ((s % 8) + 8) % 8;
    return base * z8.pow(sm);
}

AlgebraicValue gauss_sum_reduce(const SymIntMat& J, const SymIntMat& M,
                                const Int& q, long h) {
    int r = J.n, d = M.n;
    if (r == 0 || d == 0) return AlgebraicValue(1);
    long rd = long(r) * d;
    if (h < 1) throw std::invalid_argument("gauss_sum_reduce: h >= 1 required");
    if (h % 2 == 0) {
        AlgebraicValue v = AlgebraicValue::half_power(q, rd * h);
        // The h -> h-2 reduction bottoms out at G(q^0) = 1, but the final
        // step needs e{J(y)M} = 1 for all y, which fails at q = 2 when
        // neither form is even integral; the residual character sum
        // contributes zeta8^{sig(J) sig(M)} (diagonal sums mod 8).
        if (q == 2) {
            DyadicClass cj = classify_dyadic(J), cm = classify_dyadic(M);
            if (!cj.even && !cm.even)
                v *= AlgebraicValue::zeta8().pow((cj.sig * cm.sig) % 8);
        }
        return v;
    }
    AlgebraicValue one = (q == 2) ? gauss_sum_closed_dyadic(J, M)
                                  : gauss_sum_closed_odd(J, M, q);
    if (h == 1) return one;
    return AlgebraicValue::half_power(q, rd * (h - 1)) * one;
}

bool ExactCoeff::is_rational() const {
    auto v = sum.canonical();
    for (size_t k = 1; k < v.size(); ++k)
        if (v[k] != 0) return false;
    return true;
}

Rat ExactCoeff::rational() const {
    auto v = sum.canonical();
    for (size_t k = 1; k < v.size(); ++k)
        if (v[k] != 0) throw std::domain_error("ExactCoeff: not rational");
    Rat out(v.empty() ? Int(0) : v[0], den);
    out.canonicalize();
    return out;
}

AlgebraicValue a_q_formula(const JordanSplitting& SQ, const CuspPrimeProfile& PM) {
    if (SQ.q != PM.q || SQ.e != PM.e)
        throw std::invalid_argument("a_q_formula: prime data mismatch");
    const Int& q = SQ.q;
    long e = SQ.e;
    // r_c and J_c by scale.
    std::vector<int> rc(size_t(e) + 1, 0);
    std::vector<const SymIntMat*> Jc(size_t(e) + 1, nullptr);
    for (auto& b : SQ.blocks) {
        rc[size_t(b.scale)] = b.J.n;
        Jc[size_t(b.scale)] = &b.J;
    }
    // M_j blocks sliced out of the local canonical matrix.
    Int Pe = ipow(q, e);
    std::vector<SymIntMat> Mj(size_t(e) + 1);
    {
        int off = 0;
        for (long j = 0; j <= e; ++j) {
            int dj = PM.d[size_t(j)];
            SymIntMat blk(dj);
            Int Pj = ipow(q, j);
            for (int a = 0; a < dj; ++a)
                for (int b = 0; b < dj; ++b) {
                    Int v = PM.local.at(off + a, off + b);
                    if (j < e) {
                        if (v % Pj != 0) throw std::logic_error("a_q_formula: block scale");
                        blk.at(a, b) = v / Pj;
                    }
                }
            Mj[size_t(j)] = blk;
            off += dj;
        }
    }
    AlgebraicValue acc(1);
    for (long c = 1; c <= e; ++c) {
        if (rc[size_t(c)] == 0) continue;
        for (long j = 0; j < c; ++j) {
            int dj = PM.d[size_t(j)];
            if (dj == 0) continue;
            long rd = long(rc[size_t(c)]) * dj;
            long h = c - j;
            acc *= AlgebraicValue::half_power(q, -rd * h);
            if (h % 2 != 0) {
                acc *= AlgebraicValue::half_power(q, -rd);
                acc *= (q == 2) ? gauss_sum_closed_dyadic(*Jc[size_t(c)], Mj[size_t(j)])
                                : gauss_sum_closed_odd(*Jc[size_t(c)], Mj[size_t(j)], q);
            }
        }
    }
    return acc;
}

ExactCoeff a_q_exact(const SymIntMat& Q, const SymIntMat& M, const Int& q, long e,
                     const Int& N) {
    int m = Q.n, n = M.n;
    Int R = ipow(q, e);
    IMat B = scaled_inverse(Q, N * N); // N^2 Q^{-1}, even integral
    long order = 2 * ipow(R, 2).get_si(); // exponent denominator q^{2e}
    CycloSum acc = CycloSum::constant(order, 1);
    for (auto& comp : components(Q))
        acc = acc * component_char_sum(B, comp, M, R, order);
    ExactCoeff out;
    out.sum = acc;
    out.den = ipow(R, long(m) * n);
    return out;
}

ExactCoeff a_total_exact(const SymIntMat& Q, const SymIntMat& M, const Int& N) {
    int m = Q.n, n = M.n;
    IMat B = scaled_inverse(Q, N); // N Q^{-1}, even integral
    long order = 2 * N.get_si();
    CycloSum acc = CycloSum::constant(order, 1);
    for (auto& comp : components(Q))
        acc = acc * component_char_sum(B, comp, M, N, order);
    ExactCoeff out;
    out.sum = acc;
    out.den = ipow(N, long(m) * n);
    return out;
}

AlgebraicValue a_total_formula(const SymIntMat& Q, const CuspRep& rep) {
    AlgebraicValue acc(1);
    for (auto& P : rep.profile) {
        auto SQ = jordan_split(Q, P.q, P.e);
        acc *= a_q_formula(SQ, P);
    }
    return acc;
}

Rat kappa(const Int& N) { return N > 2 ? Rat(1) : Rat(1, 2); }

} // namespace siegel
