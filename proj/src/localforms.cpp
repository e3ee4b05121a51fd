#include "siegel/localforms.hpp"
#include "siegel/lift.hpp"

#include <algorithm>
#include <optional>

namespace siegel {

SymIntMat JordanSplitting::assembled() const {
    SymIntMat out(dim());
    int off = 0;
    Int qc;
    for (const auto& b : blocks) {
        qc = 1;
        for (long i = 0; i < b.scale; ++i) qc *= q;
        for (int i = 0; i < b.J.n; ++i)
            for (int j = 0; j < b.J.n; ++j)
                out.at(off + i, off + j) = mod_reduce(qc * b.J.at(i, j), precision);
        off += b.J.n;
    }
    return out; // trailing zero_size coordinates stay zero
}

std::vector<long> JordanSplitting::sizes() const {
    std::vector<long> r(e + 1, 0);
    for (const auto& b : blocks) r[b.scale] += b.J.n;
    return r;
}

int JordanSplitting::dim() const {
    int d = zero_size;
    for (const auto& b : blocks) d += b.J.n;
    return d;
}

Int level(const SymIntMat& Q) {
    if (!is_even_integral(Q)) throw std::invalid_argument("level: form not even integral");
    auto [adj, det] = Q.inverse_times_det();
    if (det == 0) throw std::domain_error("level: singular form");
    Int ad = abs(det);
    Int bound = 4 * ad;
    // Collect divisors of 4|det| and scan in increasing order.
    std::vector<Int> divs;
    for (Int d = 1; d * d <= bound; ++d) {
        if (bound % d == 0) {
            divs.push_back(d);
            if (d * d != bound) divs.push_back(bound / d);
        }
    }
    std::sort(divs.begin(), divs.end());
    for (const Int& N : divs) {
        bool ok = true;
        for (int i = 0; i < Q.n && ok; ++i)
            for (int j = 0; j < Q.n && ok; ++j) {
                Int v = N * adj.at(i, j);
                if (v % det != 0) ok = false;
                else if (i == j && (v / det) % 2 != 0) ok = false;
            }
        if (ok) return N;
    }
    throw std::logic_error("level: no divisor of 4 det worked"); // unreachable
}

int character(const SymIntMat& Q, const Int& d) {
    if (Q.n % 2 != 0) throw std::invalid_argument("rank must be even");
    if (d == 0) throw std::invalid_argument("character: d must be nonzero");
    int k = Q.n / 2;
    Int det = Q.det();
    if (gcd(d, level(Q)) != 1) throw std::invalid_argument("character: d not coprime to level");
    Int top = (k % 2 == 0) ? det : -det;
    int v = kronecker(top, abs(d));
    if (d < 0 && k % 2 == 1) v = -v;
    return v;
}

bool is_hyperbolic_mod4(const SymIntMat& J) {
    if (J.n % 2 != 0) throw std::invalid_argument("is_hyperbolic_mod4: odd size");
    if (!is_even_integral(J)) throw std::invalid_argument("is_hyperbolic_mod4: not even integral");
    Int det = J.det();
    if (det % 2 == 0) throw std::invalid_argument("is_hyperbolic_mod4: even determinant");
    Int v = (J.n / 2) % 2 == 0 ? det : -det;
    // The hyperbolic / non-hyperbolic dichotomy for even unimodular dyadic
    // blocks is detected by the determinant class mod 8 (+1 vs +5); the mod-4
    // test does not separate A from H ⊥ H.
    return mod_reduce(v, 8) == 1;
}

namespace {

// Symmetric elimination workspace: maintains work == tW * S * W mod P.
struct Reducer {
    Int q;
    long e;
    bool cusp; // zero-block mode: valuations >= e are a zero block
    Int P;     // q^{e+4}
    int n;
    IMat work, W;

    Reducer(const SymIntMat& S, const Int& q_, long e_, bool cusp_)
        : q(q_), e(e_), cusp(cusp_), n(S.n), work(S.as_imat()), W(IMat::identity(S.n)) {
        P = 1;
        for (long i = 0; i < e + 4; ++i) P *= q;
        work = work.reduced(P);
    }

    long prec_exp() const { return cusp ? e : e + 2; }
    long zero_scale() const { return cusp ? e : e + 1; }

    void colop(int dst, int src, const Int& c) {
        for (int r = 0; r < n; ++r) W.at(r, dst) = mod_reduce(W.at(r, dst) + c * W.at(r, src), P);
        for (int r = 0; r < n; ++r) work.at(r, dst) = mod_reduce(work.at(r, dst) + c * work.at(r, src), P);
        for (int r = 0; r < n; ++r) work.at(dst, r) = mod_reduce(work.at(dst, r) + c * work.at(src, r), P);
    }

    void scale_col(int i, const Int& t) {
        for (int r = 0; r < n; ++r) W.at(r, i) = mod_reduce(W.at(r, i) * t, P);
        for (int r = 0; r < n; ++r) work.at(r, i) = mod_reduce(work.at(r, i) * t, P);
        for (int r = 0; r < n; ++r) work.at(i, r) = mod_reduce(work.at(i, r) * t, P);
    }

    // Columns (i, j) <- (i, j) * T for a 2x2 T.
    void col2op(int i, int j, const IMat& T) {
        for (int r = 0; r < n; ++r) {
            Int a = W.at(r, i), b = W.at(r, j);
            W.at(r, i) = mod_reduce(a * T.at(0, 0) + b * T.at(1, 0), P);
            W.at(r, j) = mod_reduce(a * T.at(0, 1) + b * T.at(1, 1), P);
        }
        for (int r = 0; r < n; ++r) {
            Int a = work.at(r, i), b = work.at(r, j);
            work.at(r, i) = mod_reduce(a * T.at(0, 0) + b * T.at(1, 0), P);
            work.at(r, j) = mod_reduce(a * T.at(0, 1) + b * T.at(1, 1), P);
        }
        for (int r = 0; r < n; ++r) {
            Int a = work.at(i, r), b = work.at(j, r);
            work.at(i, r) = mod_reduce(a * T.at(0, 0) + b * T.at(1, 0), P);
            work.at(j, r) = mod_reduce(a * T.at(0, 1) + b * T.at(1, 1), P);
        }
    }

    // coords <- coords * T (square T of matching size).
    void colkop(const std::vector<int>& coords, const IMat& T) {
        int k = (int)coords.size();
        auto mix = [&](auto get, auto set) {
            std::vector<Int> old(k);
            for (int c = 0; c < k; ++c) old[c] = get(coords[c]);
            for (int c = 0; c < k; ++c) {
                Int v = 0;
                for (int s = 0; s < k; ++s) v += old[s] * T.at(s, c);
                set(coords[c], mod_reduce(v, P));
            }
        };
        for (int r = 0; r < n; ++r)
            mix([&](int c) { return W.at(r, c); }, [&](int c, const Int& v) { W.at(r, c) = v; });
        for (int r = 0; r < n; ++r)
            mix([&](int c) { return work.at(r, c); }, [&](int c, const Int& v) { work.at(r, c) = v; });
        for (int r = 0; r < n; ++r)
            mix([&](int c) { return work.at(c, r); }, [&](int c, const Int& v) { work.at(c, r) = v; });
    }

    long val(const Int& v) const { return valuation(mod_reduce(v, P), q, e + 4); }

    Int qpow(long k) const {
        Int r = 1;
        for (long i = 0; i < k; ++i) r *= q;
        return r;
    }
};

struct Coord {
    int idx;
    long scale;
    int pair = -1; // partner index for dyadic even 2x2 blocks
};

} // namespace

static JordanSplitting jordan_core(const SymIntMat& S, const Int& q, long e, bool cusp) {
    if (!is_prime(q)) throw std::invalid_argument("jordan_split: q must be prime");
    if (e < 1) throw std::invalid_argument("jordan_split: e must be >= 1");
    Reducer R(S, q, e, cusp);
    int n = S.n;
    const long zs = R.zero_scale();

    std::vector<int> rem(n);
    for (int i = 0; i < n; ++i) rem[i] = i;
    std::vector<Coord> done;
    std::vector<int> zero_coords;

    auto remove_rem = [&](int i) { rem.erase(std::find(rem.begin(), rem.end(), i)); };

    auto pivot_1x1 = [&](int i, long v) {
        Int qv = R.qpow(v);
        Int u = mod_reduce(R.work.at(i, i), R.P) / qv;
        Int ui = mod_inv(u, R.P);
        for (int k : rem) {
            if (k == i) continue;
            Int w = mod_reduce(R.work.at(i, k), R.P);
            if (w == 0) continue;
            R.colop(k, i, mod_reduce(-(w / qv) * ui, R.P));
        }
        done.push_back({i, v, -1});
        remove_rem(i);
    };

    while (!rem.empty()) {
        long minv = e + 4;
        for (int a : rem)
            for (int b : rem)
                if (b >= a) minv = std::min(minv, R.val(R.work.at(a, b)));
        if (minv >= zs) {
            for (int i : rem) zero_coords.push_back(i);
            rem.clear();
            break;
        }
        int di = -1;
        for (int a : rem)
            if (R.val(R.work.at(a, a)) == minv) { di = a; break; }
        if (di >= 0) {
            pivot_1x1(di, minv);
            continue;
        }
        // Off-diagonal minimum.
        int oi = -1, oj = -1;
        for (int a : rem) {
            for (int b : rem)
                if (b > a && R.val(R.work.at(a, b)) == minv) { oi = a; oj = b; break; }
            if (oi >= 0) break;
        }
        if (q != 2) {
            R.colop(oi, oj, Int(1)); // diagonal picks up the unit cross term
            pivot_1x1(oi, minv);
            continue;
        }
        // Dyadic 2x2 even pivot.
        Int qv = R.qpow(minv);
        IMat B(2, 2);
        B.at(0, 0) = mod_reduce(R.work.at(oi, oi), R.P) / qv;
        B.at(0, 1) = B.at(1, 0) = mod_reduce(R.work.at(oi, oj), R.P) / qv;
        B.at(1, 1) = mod_reduce(R.work.at(oj, oj), R.P) / qv;
        IMat Binv = B.inv_mod(R.P);
        for (int k : rem) {
            if (k == oi || k == oj) continue;
            Int w1 = mod_reduce(R.work.at(oi, k), R.P) / qv;
            Int w2 = mod_reduce(R.work.at(oj, k), R.P) / qv;
            if (w1 == 0 && w2 == 0) continue;
            Int x = mod_reduce(Binv.at(0, 0) * w1 + Binv.at(0, 1) * w2, R.P);
            Int y = mod_reduce(Binv.at(1, 0) * w1 + Binv.at(1, 1) * w2, R.P);
            R.colop(k, oi, mod_reduce(-x, R.P));
            R.colop(k, oj, mod_reduce(-y, R.P));
        }
        done.push_back({oi, minv, oj});
        done.push_back({oj, minv, oi});
        remove_rem(oi);
        remove_rem(oj);
    }

    if (!cusp) {
        // A full splitting must stay within scales [0, e].
        for (auto& c : done)
            if (c.scale > e) throw std::domain_error("jordan_split: block scale exceeds e");
        if (!zero_coords.empty()) throw std::domain_error("jordan_split: form singular past precision");
    }

    // -- Dyadic merge: a scale holding both odd pivots and even 2x2 blocks is
    //    fully diagonalizable; fold each even block into an odd pivot.
    if (q == 2) {
        for (long c = 0; c <= e; ++c) {
            auto has_diag = [&]() -> std::optional<int> {
                for (auto& d : done)
                    if (d.scale == c && d.pair < 0) return d.idx;
                return std::nullopt;
            };
            while (true) {
                int pi = -1, pj = -1;
                for (auto& d : done)
                    if (d.scale == c && d.pair > d.idx) { pi = d.idx; pj = d.pair; break; }
                if (pi < 0) break;
                auto p = has_diag();
                if (!p) break;
                // Merge: v_i += v_p makes the diagonal odd; re-pivot the triple.
                R.colop(pi, *p, Int(1));
                done.erase(std::remove_if(done.begin(), done.end(), [&](const Coord& d) {
                               return d.idx == pi || d.idx == pj || d.idx == *p;
                           }),
                           done.end());
                rem = {pi, pj, *p};
                for (int step = 0; step < 3; ++step) {
                    int best = -1;
                    for (int a : rem)
                        if (R.val(R.work.at(a, a)) == c) { best = a; break; }
                    if (best < 0) throw std::logic_error("jordan_split: dyadic merge failed");
                    pivot_1x1(best, c);
                }
                rem.clear();
            }
        }
    }

    // -- Normalization per scale block --
    Int P = R.P;
    for (long c = 0; c <= e; ++c) {
        std::vector<int> diag, pair_first;
        for (auto& d : done) {
            if (d.scale != c) continue;
            if (d.pair < 0) diag.push_back(d.idx);
            else if (d.pair > d.idx) pair_first.push_back(d.idx);
        }
        Int qc = R.qpow(c);
        long wk = e + 4 - c; // working exponent for the unit part
        Int Pw = R.qpow(wk);

        // The cusp normal form uses unit entries <1,...,1,eps>; the even-form
        // splitting uses 2<1,...,1,nu>.
        Int todd = cusp ? Int(1) : Int(2);
        if (q != 2) {
            // Target t<1,...,1,nu>: all entries t*q^c, the last one free.
            if (diag.empty()) continue;
            std::vector<int> bad; // entries whose unit is not t * square
            for (int i : diag) {
                Int u = mod_reduce(R.work.at(i, i), P) / qc;
                Int target = mod_reduce(todd * mod_inv(u, Pw), Pw);
                if (kronecker(target, q) == 1) {
                    R.scale_col(i, sqrt_mod_odd(target, q, wk));
                } else {
                    bad.push_back(i);
                }
            }
            // Pair up the non-square entries: <a,b> -> <t,t>; the conic
            // a x^2 + b y^2 = t has a point with x, y units (neither axis
            // intersection is possible when t/a, t/b are non-squares).
            for (size_t t = 0; t + 1 < bad.size(); t += 2) {
                int i = bad[t], j = bad[t + 1];
                Int a = mod_reduce(R.work.at(i, i), P) / qc;
                Int b = mod_reduce(R.work.at(j, j), P) / qc;
                Int x = 0;
                bool found = false;
                for (Int xx = 1; xx < q && !found; ++xx) {
                    Int rhs = mod_reduce((todd - a * xx * xx) * mod_inv(b, q), q);
                    if (kronecker(rhs, q) == 1) { x = xx; found = true; }
                }
                if (!found) throw std::logic_error("jordan_split: conic has no point");
                Int y = sqrt_mod_odd(mod_reduce((todd - a * x * x) * mod_inv(b, Pw), Pw), q, wk);
                Int s = sqrt_mod_odd(mod_inv(mod_reduce(a * b, Pw), Pw), q, wk);
                // T = [[x, -b y s], [y, a x s]]: tT diag(a,b) T = diag(t, t).
                IMat T(2, 2);
                T.at(0, 0) = x;
                T.at(1, 0) = y;
                T.at(0, 1) = mod_reduce(-b * y * s, P);
                T.at(1, 1) = mod_reduce(a * x * s, P);
                R.col2op(i, j, T);
            }
            if (bad.size() % 2 == 1) {
                // One leftover non-square entry: swap it into the last slot
                // (which currently holds an exact t) and make it t*omega.
                int i = bad.back(), l = diag.back();
                if (i != l) {
                    IMat T(2, 2);
                    T.at(0, 1) = 1;
                    T.at(1, 0) = 1;
                    R.col2op(i, l, T);
                }
                Int u = mod_reduce(R.work.at(l, l), P) / qc;
                Int om = least_nonresidue(q);
                R.scale_col(l, sqrt_mod_odd(mod_reduce(todd * om * mod_inv(u, Pw), Pw), q, wk));
            }
        } else {
            // Dyadic: diagonal entries to their {1,3,5,7} class.
            for (int i : diag) {
                Int u = mod_reduce(R.work.at(i, i), P) / qc;
                Int mu = mod_reduce(u, 8);
                if (wk >= 3) R.scale_col(i, sqrt_mod_2pow(mod_reduce(mu * mod_inv(u, Pw), Pw), wk));
            }
            // Even 2x2 blocks to H or A by determinant class mod 8.
            for (int i : pair_first) {
                int j = -1;
                for (auto& d : done)
                    if (d.idx == i) j = d.pair;
                IMat B(2, 2);
                B.at(0, 0) = mod_reduce(R.work.at(i, i), P) / qc;
                B.at(0, 1) = B.at(1, 0) = mod_reduce(R.work.at(i, j), P) / qc;
                B.at(1, 1) = mod_reduce(R.work.at(j, j), P) / qc;
                Int db = mod_reduce(B.det(), 8);
                IMat tgt(2, 2);
                if (db == 7) { // hyperbolic plane
                    tgt.at(0, 1) = tgt.at(1, 0) = 1;
                } else {       // A block
                    tgt.at(0, 0) = tgt.at(1, 1) = 2;
                    tgt.at(0, 1) = tgt.at(1, 0) = 1;
                }
                // Base witness mod 8 by direct search, then Hensel lifting.
                IMat T(2, 2);
                bool found = false;
                for (int a = 0; a < 8 && !found; ++a)
                    for (int b = 0; b < 8 && !found; ++b)
                        for (int cc = 0; cc < 8 && !found; ++cc)
                            for (int dd = 0; dd < 8 && !found; ++dd) {
                                if ((a * dd - b * cc) % 2 == 0) continue;
                                T.at(0, 0) = a; T.at(0, 1) = b;
                                T.at(1, 0) = cc; T.at(1, 1) = dd;
                                if ((T.transpose() * B * T).congruent(tgt, 8)) found = true;
                            }
                if (!found) throw std::logic_error("jordan_split: no dyadic base witness");
                for (long k = 3; k < wk; ++k) {
                    IMat C = (T.transpose() * B * T).reduced(Int(1) << (k + 1));
                    IMat E2 = (C - tgt).reduced(Int(1) << (k + 1));
                    bool zero = true;
                    for (auto& v : E2.e) zero = zero && v % (Int(1) << (k + 1)) == 0;
                    if (zero) continue;
                    for (auto& v : E2.e) v /= (Int(1) << k);
                    // T <- T (I + 2^{k-1} Y), Y = -C^{-1} E fixes the next bit.
                    IMat Y = (C.inv_mod(Int(8)) * E2).reduced(8);
                    for (auto& v : Y.e) v = mod_reduce(-v, 8);
                    IMat corr = IMat::identity(2);
                    for (int r = 0; r < 2; ++r)
                        for (int s = 0; s < 2; ++s)
                            corr.at(r, s) += (Int(1) << (k - 1)) * Y.at(r, s);
                    T = (T * corr).reduced(Pw);
                }
                R.col2op(i, j, T);
            }
        }
    }

    // -- Dyadic: collapse A perp A into H perp H per scale --
    if (q == 2) {
        for (long c = 0; c <= e; ++c) {
            Int qc = R.qpow(c);
            long wk = e + 4 - c;
            Int Pw = R.qpow(wk);
            auto find_A = [&](int skip1, int skip2) -> std::pair<int, int> {
                for (auto& d : done) {
                    if (d.scale != c || d.pair <= d.idx) continue;
                    if (d.idx == skip1 || d.idx == skip2) continue;
                    if (mod_reduce(R.work.at(d.idx, d.idx), P) / qc % 2 == 0 &&
                        mod_reduce(R.work.at(d.idx, d.idx), Pw * qc) != 0)
                        return {d.idx, d.pair};
                }
                return {-1, -1};
            };
            while (true) {
                auto [i1, j1] = find_A(-1, -1);
                if (i1 < 0) break;
                auto [i2, j2] = find_A(i1, -1);
                if (i2 < 0) break;
                std::vector<int> cs = {i1, j1, i2, j2};
                // Local Gram is A perp A (canonical); build an explicit
                // isometry onto H perp H via an isotropic vector.
                IMat L(4, 4);
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b)
                        L.at(a, b) = mod_reduce(R.work.at(cs[a], cs[b]), P) / qc;
                // v = (1,1,1,t): tvLv = 8 + 2t + 2t^2; solve t^2 + t + 4 == 0.
                Int t = 4; // root mod 8
                Int m2 = 8;
                while (m2 < Pw) {
                    m2 <<= 1;
                    Int f = mod_reduce(t * t + t + 4, m2);
                    if (f != 0) t = mod_reduce(t - f * mod_inv(2 * t + 1, m2), m2);
                }
                IMat v(4, 1);
                v.at(0, 0) = 1; v.at(1, 0) = 1; v.at(2, 0) = 1; v.at(3, 0) = t;
                auto S2 = [&](const IMat& x, const IMat& y) {
                    return mod_reduce((x.transpose() * L * y).at(0, 0), Pw);
                };
                IMat w0(4, 1);
                w0.at(0, 0) = 1; // S(v, e1) = 3, odd
                Int sv = S2(v, w0);
                Int s = mod_inv(sv, Pw);
                Int Wq = S2(w0, w0); // even
                Int rr = mod_reduce(-s * s * (Wq / 2), Pw); // kills Q(w1)
                IMat w1(4, 1);
                for (int a = 0; a < 4; ++a) w1.at(a, 0) = mod_reduce(s * w0.at(a, 0) + rr * v.at(a, 0), Pw);
                // Project two more basis vectors into the complement of (v, w1)
                // and pick a pair keeping the basis change invertible mod 2.
                auto project = [&](int pick) {
                    IMat z(4, 1);
                    z.at(pick, 0) = 1;
                    IMat zp(4, 1);
                    Int a1 = S2(z, w1), a2 = S2(z, v);
                    for (int a = 0; a < 4; ++a)
                        zp.at(a, 0) = mod_reduce(z.at(a, 0) - a1 * v.at(a, 0) - a2 * w1.at(a, 0), Pw);
                    return zp;
                };
                IMat T(4, 4);
                bool okbasis = false;
                for (int p1 = 0; p1 < 4 && !okbasis; ++p1)
                    for (int p2 = p1 + 1; p2 < 4 && !okbasis; ++p2) {
                        IMat z1 = project(p1), z2 = project(p2);
                        for (int a = 0; a < 4; ++a) {
                            T.at(a, 0) = v.at(a, 0);
                            T.at(a, 1) = w1.at(a, 0);
                            T.at(a, 2) = z1.at(a, 0);
                            T.at(a, 3) = z2.at(a, 0);
                        }
                        if (T.det() % 2 != 0) okbasis = true;
                    }
                if (!okbasis) throw std::logic_error("jordan_split: A+A collapse basis");
                R.colkop(cs, T);
                // First pair is now exactly H; renormalize the complement pair.
                IMat B(2, 2);
                B.at(0, 0) = mod_reduce(R.work.at(cs[2], cs[2]), P) / qc;
                B.at(0, 1) = B.at(1, 0) = mod_reduce(R.work.at(cs[2], cs[3]), P) / qc;
                B.at(1, 1) = mod_reduce(R.work.at(cs[3], cs[3]), P) / qc;
                IMat tgt(2, 2);
                tgt.at(0, 1) = tgt.at(1, 0) = 1;
                IMat Tb(2, 2);
                bool found = false;
                for (int a = 0; a < 8 && !found; ++a)
                    for (int b = 0; b < 8 && !found; ++b)
                        for (int cc = 0; cc < 8 && !found; ++cc)
                            for (int dd = 0; dd < 8 && !found; ++dd) {
                                if ((a * dd - b * cc) % 2 == 0) continue;
                                Tb.at(0, 0) = a; Tb.at(0, 1) = b;
                                Tb.at(1, 0) = cc; Tb.at(1, 1) = dd;
                                if ((Tb.transpose() * B * Tb).congruent(tgt, 8)) found = true;
                            }
                if (!found) throw std::logic_error("jordan_split: A+A complement not H");
                for (long k = 3; k < wk; ++k) {
                    IMat C = (Tb.transpose() * B * Tb).reduced(Int(1) << (k + 1));
                    IMat E2 = (C - tgt).reduced(Int(1) << (k + 1));
                    bool zero = true;
                    for (auto& vv : E2.e) zero = zero && vv % (Int(1) << (k + 1)) == 0;
                    if (zero) continue;
                    for (auto& vv : E2.e) vv /= (Int(1) << k);
                    IMat Y = (C.inv_mod(Int(8)) * E2).reduced(8);
                    for (auto& vv : Y.e) vv = mod_reduce(-vv, 8);
                    IMat corr = IMat::identity(2);
                    for (int r2 = 0; r2 < 2; ++r2)
                        for (int s2 = 0; s2 < 2; ++s2)
                            corr.at(r2, s2) += (Int(1) << (k - 1)) * Y.at(r2, s2);
                    Tb = (Tb * corr).reduced(Pw);
                }
                R.col2op(cs[2], cs[3], Tb);
            }
        }
    }

    // -- Order coordinates: ascending scale; within a dyadic scale put diagonal
    //    entries (sorted by class), then H planes, then a single A; zero last.
    struct Slot {
        int idx;
        long scale;
        int kind; // 0 diag, 1 H, 2 A (pair slots share kind), 3 zero
        Int key;
    };
    std::vector<Slot> slots;
    for (auto& d : done) {
        if (q == 2 && d.pair >= 0) {
            if (d.pair < d.idx) continue;
            Int qc = R.qpow(d.scale);
            // H iff both diagonal entries vanish (exactly, post-normalization).
            bool isH = mod_reduce(R.work.at(d.idx, d.idx), P) / qc == 0 &&
                       mod_reduce(R.work.at(d.pair, d.pair), P) / qc == 0;
            slots.push_back({d.idx, d.scale, isH ? 1 : 2, 0});
            slots.push_back({d.pair, d.scale, isH ? 1 : 2, 1});
        } else {
            Int qc = R.qpow(d.scale);
            Int u = mod_reduce(R.work.at(d.idx, d.idx), P) / qc;
            // Sort key: dyadic = class mod 8; odd q = nu (entry != target) last.
            Int key = (q == 2) ? mod_reduce(u, 8)
                               : Int(mod_reduce(u, q * q) == (cusp ? 1 : 2) ? 0 : 1);
            slots.push_back({d.idx, d.scale, 0, key});
        }
    }
    for (int i : zero_coords) slots.push_back({i, (long)e, 3, 0});
    std::stable_sort(slots.begin(), slots.end(), [&](const Slot& a, const Slot& b) {
        if (a.scale != b.scale) return a.scale < b.scale;
        if (a.kind != b.kind) return a.kind < b.kind;
        if (a.kind != 0) return false; // pair slots keep internal order
        return a.key < b.key;
    });
    // Apply the permutation as a column permutation.
    {
        IMat Pm(n, n);
        for (int newpos = 0; newpos < n; ++newpos) Pm.at(slots[newpos].idx, newpos) = 1;
        R.colkop([&] {
            std::vector<int> all(n);
            for (int i = 0; i < n; ++i) all[i] = i;
            return all;
        }(), Pm);
    }

    // -- Fold the witness determinant back to 1 --
    long prec = R.prec_exp();
    Int Pprec = R.qpow(prec);
    Int det = mod_reduce(R.W.det(), P);
    if (det % q == 0) throw std::logic_error("jordan_split: witness degenerated");
    if (det != 1) {
        Int fix = mod_inv(det, P);
        bool absorbed = false;
        if (!zero_coords.empty()) {
            // Zero-block columns absorb anything (entries vanish mod q^e).
            int pos = n - 1;
            R.scale_col(pos, fix);
            absorbed = true;
        } else if (q != 2) {
            // Scale a nu column: the top block's for the even-form splitting,
            // the leading block's in cusp mode (middle cusp blocks must keep
            // exact unit data; only the leading block's last entry is free).
            int pos = n - 1;
            if (cusp) {
                pos = 0;
                while (pos + 1 < n && slots[pos + 1].scale == slots[0].scale) ++pos;
            }
            R.scale_col(pos, fix);
            absorbed = true;
        } else if (mod_reduce(fix, Pprec) == Pprec - 1) {
            // fix == -1: negate a diagonal column (Gram-invariant), or swap
            // an H pair, or flip the sign of an A parameter.
            int pos = 0;
            for (auto& s : slots) {
                if (s.kind == 0) {
                    R.scale_col(pos, Int(-1));
                    absorbed = true;
                    break;
                }
                ++pos;
            }
            pos = 0;
            for (auto& s : slots) {
                if (absorbed) break;
                if (s.kind == 1 && s.key == 0) {
                    IMat sw(2, 2);
                    sw.at(0, 1) = sw.at(1, 0) = 1;
                    R.col2op(pos, pos + 1, sw);
                    absorbed = true;
                }
                ++pos;
            }
            pos = 0;
            for (auto& s : slots) {
                if (absorbed) break;
                if (s.kind == 2 && s.key == 1) {
                    R.scale_col(pos, Int(-1)); // a -> -a, shape preserved
                    absorbed = true;
                }
                ++pos;
            }
        } else {
            // The last even block of a scale carries the free odd parameter a
            // ([[0,a],[a,0]] or [[2a',a],[a,2a'a^2]]): scaling its second
            // column by fix stays inside the canonical family exactly.
            int ppos = -1;
            {
                int pos = 0;
                for (auto& s : slots) {
                    if ((s.kind == 1 || s.kind == 2) && s.key == 1) ppos = pos;
                    ++pos;
                }
            }
            if (ppos >= 0) {
                R.scale_col(ppos, fix);
                absorbed = true;
            } else {
                // Diagonal-only: prefer a column where fix^2 == 1 at its
                // precision (entry stays an exact class representative) ...
                int pos = 0, fallback = -1;
                for (auto& s : slots) {
                    if (s.kind == 0) {
                        long need = std::max<long>(prec - s.scale, 0);
                        Int Pn = R.qpow(need);
                        if (mod_reduce(fix * fix, Pn) == mod_reduce(Int(1), Pn)) {
                            R.scale_col(pos, fix);
                            absorbed = true;
                            break;
                        }
                        fallback = pos; // last diagonal column (highest scale)
                    }
                    ++pos;
                }
                // ... else the last diagonal entry absorbs it up to a unit
                // square: mu -> mu fix^2, same class mod 8.
                if (!absorbed && fallback >= 0) {
                    R.scale_col(fallback, fix);
                    absorbed = true;
                }
            }
        }
        if (!absorbed) throw std::logic_error("jordan_split: could not normalize witness determinant");
        det = mod_reduce(R.W.det(), P);
        if (mod_reduce(det, Pprec) != mod_reduce(Int(1), Pprec))
            throw std::logic_error("jordan_split: determinant fold failed");
    }

    // -- Package result --
    JordanSplitting out;
    out.q = q;
    out.e = e;
    out.precision = Pprec;
    out.zero_size = (long)zero_coords.size();
    int nn = n - (int)zero_coords.size();
    // Re-read blocks from the reordered work matrix.
    {
        int pos = 0;
        while (pos < nn) {
            long c = slots[pos].scale;
            Int qc = R.qpow(c);
            int end = pos;
            while (end < nn && slots[end].scale == c) ++end;
            SymIntMat J(end - pos);
            for (int a = pos; a < end; ++a)
                for (int b = pos; b < end; ++b)
                    J.at(a - pos, b - pos) = mod_reduce(mod_reduce(R.work.at(a, b), Pprec * qc) / qc,
                                                        R.qpow(std::max<long>(prec - c, 1)));
            out.blocks.push_back({c, J});
            pos = end;
        }
    }
    out.G = lift_special(ModMatrix(Pprec, R.W));
    // Sanity: witness congruence.
    SymIntMat asm_full = out.assembled();
    IMat lhs = (out.G.transpose() * S.as_imat() * out.G).reduced(Pprec);
    if (!lhs.congruent(asm_full.as_imat(), Pprec))
        throw std::logic_error("jordan_split: witness congruence failed");
    return out;
}

JordanSplitting jordan_split(const SymIntMat& S, const Int& q, long e) {
    return jordan_core(S, q, e, false);
}

JordanSplitting jordan_split_cusp(const SymIntMat& M, const Int& q, long e) {
    return jordan_core(M, q, e, true);
}

} // namespace siegel
