#include "siegel/cusps.hpp"

#include "siegel/lift.hpp"
#include "siegel/localforms.hpp"
#include "siegel/symplectic.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace siegel {

namespace {

Int ipow(const Int& q, long k) {
    Int r = 1;
    for (long i = 0; i < k; ++i) r *= q;
    return r;
}

bool set_reason(std::string* reason, const std::string& msg) {
    if (reason) *reason = msg;
    return false;
}

// A 1x1 or 2x2 diagonal-block cell of a local matrix.
struct Cell {
    int pos;
    int size;
    long scale;
};

// Scan the cell structure of R mod q^e: 1x1 cells carry the valuation of
// the diagonal entry, 2x2 cells the valuation of the off-diagonal entry
// (which must be strictly below both diagonal valuations).  Everything
// outside the cells must vanish mod q^e and the scales must be ascending.
bool parse_cells(const IMat& R, int n, const Int& q, long e, bool allow_pairs,
                 std::vector<Cell>& cells, std::string* reason) {
    Int Pe = ipow(q, e);
    auto val = [&](const Int& x) { return valuation(mod_reduce(x, Pe), q, e); };
    int p = 0;
    while (p < n) {
        long vo = e;
        if (allow_pairs && p + 1 < n) vo = val(R.at(p, p + 1));
        if (vo < e) {
            long vd = std::min(val(R.at(p, p)), val(R.at(p + 1, p + 1)));
            if (vd <= vo) return set_reason(reason, "pair cell with a diagonal entry at its own scale");
            cells.push_back({p, 2, vo});
            p += 2;
        } else {
            cells.push_back({p, 1, val(R.at(p, p))});
            p += 1;
        }
    }
    for (size_t i = 1; i < cells.size(); ++i)
        if (cells[i].scale < cells[i - 1].scale)
            return set_reason(reason, "block scales not ascending");
    std::vector<int> owner(n);
    for (size_t c = 0; c < cells.size(); ++c)
        for (int k = 0; k < cells[c].size; ++k) owner[cells[c].pos + k] = int(c);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (owner[i] != owner[j] && mod_reduce(R.at(i, j), Pe) != 0)
                return set_reason(reason, "nonzero entry between blocks");
    return true;
}

bool eq_mod(const Int& a, const Int& b, const Int& m) { return mod_reduce(a - b, m) == 0; }

// Reduced test for a diagonal local part: odd q (any n), or q = 2 with
// n = 1 (where the middle-block and zero-block cases never arise).
bool reduced_local_diag(const IMat& R, int n, const Int& q, long e, std::string* reason) {
    std::vector<Cell> cells;
    if (!parse_cells(R, n, q, e, false, cells, reason)) return false;
    Int Pe = ipow(q, e);
    long ell = cells.front().scale;
    if (ell >= e) return true; // M == 0 mod q^e
    long h = cells.back().scale;
    if (h > e) h = e;
    // Group into blocks by scale and check the unit data.
    for (size_t c = 0; c < cells.size();) {
        long j = cells[c].scale;
        size_t cend = c;
        while (cend < cells.size() && cells[cend].scale == j) ++cend;
        if (j >= e) break;
        Int Pj = ipow(q, e - j);
        for (size_t t = c; t < cend; ++t) {
            Int u = mod_reduce(mod_reduce(R.at(cells[t].pos, cells[t].pos), Pe) / ipow(q, j), Pj);
            if (t + 1 < cend) {
                if (u != 1) return set_reason(reason, "non-final block entry not 1");
                continue;
            }
            // Last entry of the block: the unit eps_j.
            if (j > ell) {
                Int om = least_nonresidue(q);
                if (u != 1 && !eq_mod(u, om, Pj))
                    return set_reason(reason, "middle block unit not 1 or omega");
            } else if (ell == 0) {
                if (u != 1) return set_reason(reason, "leading unit at scale 0 must be 1");
            } else if (h == e) {
                Int om = least_nonresidue(q);
                if (u != 1 && !eq_mod(u, om, Pj))
                    return set_reason(reason, "leading unit not 1 or omega with a zero block");
            } else {
                long m = std::min(ell, e - h);
                if (u > ipow(q, m))
                    return set_reason(reason, "leading unit exceeds its canonical range");
            }
        }
        c = cend;
    }
    return true;
}

// Reduced test for the dyadic part with n > 1 and e <= 2:
// M == I_d perp 2 J_1 perp 0 mod 2^e with J_1 = I or a sum of H planes.
bool reduced_local_dyadic_small(const IMat& R, int n, long e, std::string* reason) {
    std::vector<Cell> cells;
    if (!parse_cells(R, n, 2, e, e == 2, cells, reason)) return false;
    Int Pe = ipow(2, e);
    for (size_t c = 0; c < cells.size();) {
        long j = cells[c].scale;
        size_t cend = c;
        while (cend < cells.size() && cells[cend].scale == j) ++cend;
        if (j >= e) break;
        bool any_pair = false, any_diag = false;
        for (size_t t = c; t < cend; ++t) (cells[t].size == 2 ? any_pair : any_diag) = true;
        if (any_pair && any_diag) return set_reason(reason, "mixed diagonal and plane block");
        if (j == 0) {
            if (any_pair) return set_reason(reason, "unit block must be diagonal");
            for (size_t t = c; t < cend; ++t)
                if (!eq_mod(R.at(cells[t].pos, cells[t].pos), 1, Pe))
                    return set_reason(reason, "unit block entry not 1");
        }
        // j == 1 (e == 2): diagonal entries are == 2 mod 4 and plane cells
        // are == 2H mod 4 automatically, given the cell scan.
        c = cend;
    }
    return true;
}

// Strict class representative of an odd unit mod 2^{e-j}.
bool dyadic_class_ok(const Int& u, const Int& Pj) {
    Int m8 = Pj < 8 ? Pj : Int(8);
    return eq_mod(u, mod_reduce(u, m8), Pj);
}

bool pair_is(const IMat& R, const Cell& cl, long j, const Int& Pe, const Int& Pj, Int b00,
             Int b01, Int b11) {
    Int qj = ipow(2, j);
    Int a00 = mod_reduce(R.at(cl.pos, cl.pos), Pe) / qj;
    Int a01 = mod_reduce(R.at(cl.pos, cl.pos + 1), Pe) / qj;
    Int a11 = mod_reduce(R.at(cl.pos + 1, cl.pos + 1), Pe) / qj;
    return eq_mod(a00, b00, Pj) && eq_mod(a01, b01, Pj) && eq_mod(a11, b11, Pj);
}

bool partial_local_dyadic(const IMat& R, int n, long e, std::string* reason) {
    std::vector<Cell> cells;
    if (!parse_cells(R, n, 2, e, true, cells, reason)) return false;
    Int Pe = ipow(2, e);
    long ell = cells.front().scale;
    if (ell >= e) return true;
    for (size_t c = 0; c < cells.size();) {
        long j = cells[c].scale;
        size_t cend = c;
        while (cend < cells.size() && cells[cend].scale == j) ++cend;
        if (j >= e) break;
        Int qj = ipow(2, j);
        Int Pj = ipow(2, e - j);
        bool any_pair = false, any_diag = false;
        for (size_t t = c; t < cend; ++t) (cells[t].size == 2 ? any_pair : any_diag) = true;
        if (any_pair && any_diag) return set_reason(reason, "mixed diagonal and plane block");
        if (j == 0) {
            if (any_pair) return set_reason(reason, "unit block must be the identity");
            for (size_t t = c; t < cend; ++t)
                if (!eq_mod(R.at(cells[t].pos, cells[t].pos), 1, Pe))
                    return set_reason(reason, "unit block entry not 1");
        } else if (j > ell) { // middle block
            for (size_t t = c; t < cend; ++t) {
                const Cell& cl = cells[t];
                if (cl.size == 1) {
                    Int u = mod_reduce(mod_reduce(R.at(cl.pos, cl.pos), Pe) / qj, Pj);
                    if (!dyadic_class_ok(u, Pj))
                        return set_reason(reason, "middle diagonal entry not a class representative");
                } else {
                    bool isH = pair_is(R, cl, j, Pe, Pj, 0, 1, 0);
                    bool isA = pair_is(R, cl, j, Pe, Pj, 2, 1, 2);
                    if (!isH && !(isA && t + 1 == cend))
                        return set_reason(reason, "middle plane block not H (or final A)");
                }
            }
        } else { // leading block, ell > 0
            for (size_t t = c; t < cend; ++t) {
                const Cell& cl = cells[t];
                if (cl.size == 1) {
                    if (t + 1 == cend) continue; // final entry: any odd unit
                    Int u = mod_reduce(mod_reduce(R.at(cl.pos, cl.pos), Pe) / qj, Pj);
                    if (!dyadic_class_ok(u, Pj))
                        return set_reason(reason, "leading diagonal entry not a class representative");
                } else {
                    if (t + 1 < cend) {
                        if (!pair_is(R, cl, j, Pe, Pj, 0, 1, 0))
                            return set_reason(reason, "non-final leading plane not H");
                        continue;
                    }
                    // Final pair: A'(a', a) = [[2a', a], [a, 2a' a^2]], a odd.
                    Int a = mod_reduce(R.at(cl.pos, cl.pos + 1), Pe) / qj;
                    bool ok = pair_is(R, cl, j, Pe, Pj, 0, a, 0) ||
                              pair_is(R, cl, j, Pe, Pj, 2, a, mod_reduce(2 * a * a, Pj));
                    if (!ok) return set_reason(reason, "final leading plane not in the A' family");
                }
            }
        }
        c = cend;
    }
    return true;
}

} // namespace

bool is_reduced(const SymIntMat& M, int n, const Int& N, std::string* reason) {
    if (M.n != n) throw std::invalid_argument("is_reduced: dimension mismatch");
    if (N < 1) throw std::invalid_argument("is_reduced: N must be positive");
    for (auto& [q, e] : factorize(N)) {
        IMat R = M.as_imat().reduced(ipow(q, e));
        bool ok;
        if (q == 2 && n > 1) {
            if (e >= 3) throw std::domain_error("use partially reduced test for 2-part");
            ok = reduced_local_dyadic_small(R, n, e, reason);
        } else {
            ok = reduced_local_diag(R, n, q, e, reason);
        }
        if (!ok) {
            if (reason) *reason = "mod " + ipow(q, e).get_str() + ": " + *reason;
            return false;
        }
    }
    return true;
}

bool is_partially_reduced_dyadic(const SymIntMat& M, int n, long e, std::string* reason) {
    if (M.n != n) throw std::invalid_argument("is_partially_reduced_dyadic: dimension mismatch");
    if (n <= 1 || e < 3)
        throw std::invalid_argument("is_partially_reduced_dyadic: requires n > 1 and e >= 3");
    IMat R = M.as_imat().reduced(ipow(2, e));
    return partial_local_dyadic(R, n, e, reason);
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

namespace {

struct LocalRep {
    std::vector<int> d;
    SymIntMat local; // canonical mod q^e
};

// Non-decreasing tuples of the given length over the value list U.
void tuples_nondecr(const std::vector<Int>& U, int len, size_t start, std::vector<Int>& cur,
                    std::vector<std::vector<Int>>& out) {
    if (len == 0) {
        out.push_back(cur);
        return;
    }
    for (size_t i = start; i < U.size(); ++i) {
        cur.push_back(U[i]);
        tuples_nondecr(U, len - 1, i, cur, out);
        cur.pop_back();
    }
}

SymIntMat diag_block(const std::vector<Int>& entries) {
    SymIntMat J(int(entries.size()));
    for (size_t i = 0; i < entries.size(); ++i) J.set(int(i), int(i), entries[i]);
    return J;
}

SymIntMat planes_block(int pairs, const SymIntMat& last) {
    SymIntMat H(2, {0, 1, 1, 0});
    SymIntMat J(0);
    for (int i = 0; i + 1 < pairs; ++i) J = J.dsum(H);
    return J.dsum(last);
}

// Option lists for one block of size dj at scale j, given the profile context.
std::vector<SymIntMat> block_options(int n, const Int& q, long e, long j, long ell, long h,
                                     int dj) {
    std::vector<SymIntMat> out;
    (void)n;
    if (q != 2 || n == 1) {
        std::vector<Int> eps;
        if (j > ell) {
            eps = {1, least_nonresidue(q)};
        } else if (ell == 0) {
            eps = {1};
        } else if (h == e) {
            eps = {1, least_nonresidue(q)};
        } else {
            Int top = ipow(q, std::min(ell, e - h));
            for (Int r = 1; r <= top; ++r)
                if (gcd(r, q) == 1) eps.push_back(r);
        }
        for (auto& ep : eps) {
            std::vector<Int> entries(dj, 1);
            entries.back() = ep;
            out.push_back(diag_block(entries));
        }
        return out;
    }
    // Dyadic, n > 1.
    if (e <= 2) {
        if (j == 0) {
            out.push_back(diag_block(std::vector<Int>(dj, 1)));
        } else {
            out.push_back(diag_block(std::vector<Int>(dj, 1)));
            if (dj % 2 == 0) out.push_back(planes_block(dj / 2, SymIntMat(2, {0, 1, 1, 0})));
        }
        return out;
    }
    // Partially reduced family, e >= 3.
    Int Pj = ipow(2, e - j);
    std::vector<Int> U;
    for (Int v : {Int(1), Int(3), Int(5), Int(7)}) {
        Int r = mod_reduce(v, Pj);
        if (std::find(U.begin(), U.end(), r) == U.end()) U.push_back(r);
    }
    std::sort(U.begin(), U.end());
    if (j == 0) {
        out.push_back(diag_block(std::vector<Int>(dj, 1)));
        return out;
    }
    if (j > ell) { // middle block
        std::vector<std::vector<Int>> tups;
        std::vector<Int> cur;
        tuples_nondecr(U, dj, 0, cur, tups);
        for (auto& t : tups) out.push_back(diag_block(t));
        if (dj % 2 == 0) {
            out.push_back(planes_block(dj / 2, SymIntMat(2, {0, 1, 1, 0})));
            if (e - j >= 2) out.push_back(planes_block(dj / 2, SymIntMat(2, {2, 1, 1, 2})));
        }
        return out;
    }
    // Leading block, ell > 0.
    std::vector<Int> odds;
    for (Int a = 1; a < Pj; a += 2) odds.push_back(a);
    if (odds.empty()) odds.push_back(1);
    {
        std::vector<std::vector<Int>> tups;
        std::vector<Int> cur;
        tuples_nondecr(U, dj - 1, 0, cur, tups);
        for (auto& t : tups)
            for (auto& eta : odds) {
                auto full = t;
                full.push_back(eta);
                out.push_back(diag_block(full));
            }
    }
    if (dj % 2 == 0) {
        for (Int ap : {Int(0), Int(1)})
            for (auto& a : odds) {
                SymIntMat Ap(2);
                Ap.set(0, 0, 2 * ap);
                Ap.set(0, 1, a);
                Ap.set(1, 1, mod_reduce(2 * ap * a * a, Pj));
                out.push_back(planes_block(dj / 2, Ap));
            }
    }
    return out;
}

std::vector<LocalRep> enumerate_local(int n, const Int& q, long e) {
    Int Pe = ipow(q, e);
    std::vector<LocalRep> out;
    std::vector<int> d(size_t(e) + 1, 0);
    // Size profiles in lexicographically descending order (d_0 largest first).
    std::function<void(long, int)> comp = [&](long j, int left) {
        if (j == e) {
            d[size_t(e)] = left;
            // Unit data per nonzero block below scale e.
            long ell = e, h = -1;
            for (long s = 0; s <= e; ++s)
                if (d[size_t(s)] > 0) {
                    ell = std::min(ell, s);
                    h = s;
                }
            std::vector<long> scales;
            std::vector<std::vector<SymIntMat>> opts;
            for (long s = 0; s < e; ++s)
                if (d[size_t(s)] > 0) {
                    scales.push_back(s);
                    opts.push_back(block_options(n, q, e, s, ell, h, d[size_t(s)]));
                }
            std::vector<size_t> idx(opts.size(), 0);
            while (true) {
                SymIntMat loc(0);
                for (size_t t = 0; t < opts.size(); ++t)
                    loc = loc.dsum(opts[t][idx[t]].scaled(ipow(q, scales[t])));
                loc = loc.dsum(SymIntMat(left));
                LocalRep rep;
                rep.d = d;
                rep.local = loc.reduced(Pe);
                // Drop exact duplicates (collapsing unit data at low precision).
                bool dup = false;
                for (auto& prev : out)
                    if (prev.d == rep.d && prev.local.as_imat() == rep.local.as_imat()) {
                        dup = true;
                        break;
                    }
                if (!dup) out.push_back(rep);
                // Odometer, last block fastest.
                size_t t = opts.size();
                while (t > 0) {
                    --t;
                    if (++idx[t] < opts[t].size()) break;
                    idx[t] = 0;
                    if (t == 0) return;
                }
                if (opts.empty()) return;
            }
        }
        for (int v = left; v >= 0; --v) {
            d[size_t(j)] = v;
            comp(j + 1, left - v);
        }
        d[size_t(j)] = 0;
    };
    if (e >= 1) comp(0, n);
    return out;
}

} // namespace

std::vector<CuspRep> enumerate_reduced(int n, const Int& N) {
    if (n < 1) throw std::invalid_argument("enumerate_reduced: n must be >= 1");
    if (N < 1) throw std::invalid_argument("enumerate_reduced: N must be positive");
    auto facs = factorize(N);
    std::vector<std::vector<LocalRep>> locals;
    for (auto& [q, e] : facs) locals.push_back(enumerate_local(n, q, e));
    bool partial = false;
    for (auto& [q, e] : facs) partial = partial || (q == 2 && e >= 3 && n > 1);

    std::vector<CuspRep> out;
    std::vector<size_t> idx(facs.size(), 0);
    while (true) {
        CuspRep rep;
        rep.n = n;
        rep.N = N;
        rep.partial = partial;
        SymIntMat M(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Int v = 0, m = 1;
                for (size_t t = 0; t < facs.size(); ++t) {
                    Int Pe = ipow(facs[t].first, facs[t].second);
                    v = crt2(v, m, locals[t][idx[t]].local.at(i, j), Pe);
                    m *= Pe;
                }
                M.set(i, j, v);
            }
        rep.M = M;
        for (size_t t = 0; t < facs.size(); ++t)
            rep.profile.push_back(
                {facs[t].first, facs[t].second, locals[t][idx[t]].d, locals[t][idx[t]].local});
        out.push_back(rep);
        // Odometer, last prime fastest.
        size_t t = facs.size();
        bool done = facs.empty();
        while (t > 0) {
            --t;
            if (++idx[t] < locals[t].size()) break;
            idx[t] = 0;
            if (t == 0) done = true;
        }
        if (done) break;
    }
    return out;
}

std::vector<CuspRep> dedupe_reduced(const std::vector<CuspRep>& reps) {
    if (reps.empty()) return {};
    int n = reps.front().n;
    long N = reps.front().N.get_si();
    SpOracle oracle(n, N);
    std::vector<CuspRep> out;
    std::vector<int> seen;
    for (auto& r : reps) {
        int c = oracle.coset_of(gamma_of(r.M).reduced(N));
        if (std::find(seen.begin(), seen.end(), c) == seen.end()) {
            seen.push_back(c);
            out.push_back(r);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Constructive reduction
// ---------------------------------------------------------------------------

namespace {

// Accumulates moves G_m (M I) beta_m == (M' I) mod q^e, with
// beta_m = [[A, B], [0, D]] upper block-triangular.
struct Mover {
    Int Pe;
    int n;
    IMat M, G, A, B, D;

    Mover(const SymIntMat& Min, const Int& Pe_)
        : Pe(Pe_), n(Min.n), M(Min.as_imat().reduced(Pe_)), G(IMat::identity(Min.n)),
          A(IMat::identity(Min.n)), B(Min.n, Min.n), D(IMat::identity(Min.n)) {}

    void apply(const IMat& Gm, const IMat& Am, const IMat& Bm, const IMat& Dm) {
        IMat Mn = (Gm * M * Am).reduced(Pe);
        IMat chk = (Gm * (M * Bm + Dm)).reduced(Pe);
        if (!chk.congruent(IMat::identity(n), Pe))
            throw std::logic_error("cusp reduce: move breaks the coset pair identity");
        if (!Mn.congruent(Mn.transpose(), Pe))
            throw std::logic_error("cusp reduce: move breaks symmetry");
        B = (A * Bm + B * Dm).reduced(Pe);
        A = (A * Am).reduced(Pe);
        D = (D * Dm).reduced(Pe);
        G = (Gm * G).reduced(Pe);
        M = Mn;
    }

    // Conjugation M -> tG0 M G0 via the torus element diag(G0, tG0^{-1}).
    void conj(const IMat& G0) {
        apply(G0.transpose().reduced(Pe), G0.reduced(Pe), IMat(n, n),
              G0.inv_mod(Pe).transpose());
    }

    // Scale coordinate i by u and coordinate j by u^{-1} (det-1 conjugation).
    void shuttle(int i, const Int& u, int j) {
        IMat G0 = IMat::identity(n);
        G0.at(i, i) = mod_reduce(u, Pe);
        G0.at(j, j) = mod_inv(u, Pe);
        conj(G0);
    }

    // Upper-triangular twist at coordinate i0 sending the diagonal entry
    // q^l eta to q^l eps (requires eps == eta mod q^l).
    void twist(int i0, const Int& q, long l, const Int& eta, const Int& eps) {
        Int alpha = mod_reduce(mod_inv(eta, Pe) * eps, Pe);
        Int delta = mod_inv(alpha, Pe);
        Int num = mod_reduce(1 - delta, Pe);
        Int ql = ipow(q, l);
        if (mod_reduce(num, ql) != 0)
            throw std::logic_error("cusp reduce: twist target outside its congruence class");
        Int b = mod_reduce((num / ql) * mod_inv(eta, Pe), Pe);
        IMat Am = IMat::identity(n), Bm(n, n), Dm = IMat::identity(n);
        Am.at(i0, i0) = alpha;
        Dm.at(i0, i0) = delta;
        Bm.at(i0, i0) = b;
        apply(IMat::identity(n), Am, Bm, Dm);
    }
};

struct LocalReduction {
    std::vector<int> d;
    IMat Mout, G, A, B, D; // all mod q^e
};

// One placed block of the splitting inside the working matrix.
struct Placed {
    long scale;
    int offset;
    int size;
};

LocalReduction reduce_local(const SymIntMat& Min, int n, const Int& q, long e) {
    Int Pe = ipow(q, e);
    Mover mv(Min, Pe);
    std::vector<int> d(size_t(e) + 1, 0);

    if (n == 1) {
        Int v = mod_reduce(Min.at(0, 0), Pe);
        if (v == 0) {
            d[size_t(e)] = 1;
        } else {
            long ell = valuation(v, q, e);
            Int eta = v / ipow(q, ell);
            long m = std::min(ell, e - ell);
            Int eps = m == 0 ? Int(1) : mod_reduce(eta, ipow(q, m));
            if (!eq_mod(ipow(q, ell) * eps, v, Pe)) mv.twist(0, q, ell, eta, eps);
            d[size_t(ell)] = 1;
        }
        return {d, mv.M, mv.G, mv.A, mv.B, mv.D};
    }

    auto js = jordan_split_cusp(Min, q, e);
    mv.conj(js.G);

    std::vector<Placed> blocks;
    {
        int off = 0;
        for (auto& b : js.blocks) {
            blocks.push_back({b.scale, off, b.J.n});
            d[size_t(b.scale)] = b.J.n;
            off += b.J.n;
        }
    }
    d[size_t(e)] = int(js.zero_size);

    if (!blocks.empty()) {
        long ell = blocks.front().scale;
        long h = js.zero_size > 0 ? e : blocks.back().scale;
        if (q != 2) {
            const Placed& lead = blocks.front();
            int i0 = lead.offset + lead.size - 1;
            Int etap = mod_reduce(mv.M.at(i0, i0), Pe) / ipow(q, ell);
            Int Pl = ipow(q, e - ell);
            if (ell == 0) {
                if (!eq_mod(etap, 1, Pe)) mv.twist(i0, q, 0, etap, 1);
            } else if (h == e) {
                Int eps = kronecker(etap, q) == 1 ? Int(1) : least_nonresidue(q);
                if (!eq_mod(etap, eps, Pl)) {
                    Int u = sqrt_mod_odd(mod_reduce(eps * mod_inv(etap, Pe), Pe), q, e);
                    mv.shuttle(i0, u, n - 1);
                }
            } else {
                long m = std::min(ell, e - h);
                Int eps = m == 0 ? Int(1) : mod_reduce(etap, ipow(q, m));
                if (!eq_mod(etap, eps, Pl)) {
                    if (ell <= e - h) {
                        mv.twist(i0, q, ell, etap, eps);
                    } else {
                        const Placed& top = blocks.back();
                        Int u = sqrt_mod_odd(mod_reduce(eps * mod_inv(etap, Pe), Pe), q, e);
                        mv.shuttle(i0, u, top.offset + top.size - 1);
                    }
                }
            }
        } else {
            // Dyadic, n > 1: shuttle the one possibly non-strict slot of the
            // splitting into a free position (zero block, the unit block that
            // is about to become I, or the leading block's final slot).
            auto target = [&]() -> int {
                if (js.zero_size > 0) return n - 1;
                if (ell == 0) return 0;
                const Placed& lead = blocks.front();
                return lead.offset + lead.size - 1;
            };
            for (auto& blk : blocks) {
                if (ell == 0 && blk.scale == 0) continue; // erased below
                long j = blk.scale;
                Int qj = ipow(2, j);
                Int Pj = ipow(2, e - j);
                bool leading = j == ell && ell > 0;
                // Walk the cells of this block.
                int p = blk.offset;
                while (p < blk.offset + blk.size) {
                    bool pairc = p + 1 < blk.offset + blk.size &&
                                 valuation(mod_reduce(mv.M.at(p, p + 1), Pe), q, e) < e;
                    if (!pairc) {
                        Int u = mod_reduce(mv.M.at(p, p), Pe) / qj;
                        bool last = p == blk.offset + blk.size - 1;
                        if (!dyadic_class_ok(mod_reduce(u, Pj), Pj) && !(leading && last)) {
                            Int t = mod_reduce(u, 8);
                            Int s = sqrt_mod_2pow(mod_reduce(t * mod_inv(u, Pe), Pe), e);
                            int tg = target();
                            if (tg == p) throw std::logic_error("cusp reduce: shuttle target clash");
                            mv.shuttle(p, s, tg);
                        }
                        p += 1;
                    } else {
                        Int b00 = mod_reduce(mv.M.at(p, p), Pe) / qj;
                        Int b01 = mod_reduce(mv.M.at(p, p + 1), Pe) / qj;
                        Int b11 = mod_reduce(mv.M.at(p + 1, p + 1), Pe) / qj;
                        bool strict = (eq_mod(b00, 0, Pj) && eq_mod(b01, 1, Pj) && eq_mod(b11, 0, Pj)) ||
                                      (eq_mod(b00, 2, Pj) && eq_mod(b01, 1, Pj) && eq_mod(b11, 2, Pj));
                        bool last = p + 2 == blk.offset + blk.size;
                        bool family =
                            leading && last &&
                            ((eq_mod(b00, 0, Pj) && eq_mod(b11, 0, Pj)) ||
                             (eq_mod(b00, 2, Pj) && eq_mod(b11, 2 * b01 * b01, Pj)));
                        if (!strict && !family) {
                            Int s;
                            if (eq_mod(b00, 0, Pj) && eq_mod(b11, 0, Pj))
                                s = mod_inv(b01, Pe);
                            else if (eq_mod(b00, 2, Pj) && eq_mod(b11, 2 * b01 * b01, Pj))
                                s = mod_inv(b01, Pe);
                            else
                                throw std::logic_error("cusp reduce: unexpected dyadic block shape");
                            int tg = target();
                            if (tg == p + 1) throw std::logic_error("cusp reduce: shuttle target clash");
                            mv.shuttle(p + 1, s, tg);
                        }
                        p += 2;
                    }
                }
            }
            if (ell == 0) {
                // Send the unit block to the identity with an upper move:
                // A = M0^{-1}, B = M0^{-1} - I, D = M0 on the block.
                int d0 = blocks.front().size;
                IMat B0(d0, d0);
                for (int i = 0; i < d0; ++i)
                    for (int j2 = 0; j2 < d0; ++j2) B0.at(i, j2) = mv.M.at(i, j2);
                IMat B0i = B0.inv_mod(Pe);
                IMat Am = IMat::identity(n), Bm(n, n), Dm = IMat::identity(n);
                for (int i = 0; i < d0; ++i)
                    for (int j2 = 0; j2 < d0; ++j2) {
                        Am.at(i, j2) = B0i.at(i, j2);
                        Bm.at(i, j2) = mod_reduce(B0i.at(i, j2) - (i == j2 ? 1 : 0), Pe);
                        Dm.at(i, j2) = B0.at(i, j2);
                    }
                mv.apply(IMat::identity(n), Am, Bm, Dm);
            }
        }
    }
    return {d, mv.M, mv.G, mv.A, mv.B, mv.D};
}

} // namespace

CuspReduction reduce_cusp(const SymIntMat& M_in, int n, const Int& N) {
    if (M_in.n != n) throw std::invalid_argument("reduce_cusp: dimension mismatch");
    if (N < 1) throw std::invalid_argument("reduce_cusp: N must be positive");
    auto facs = factorize(N);
    std::vector<LocalReduction> locals;
    for (auto& [q, e] : facs) locals.push_back(reduce_local(M_in, n, q, e));

    // CRT-combine the local data and lift.
    auto combine = [&](auto&& pick) {
        IMat R(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Int v = 0, m = 1;
                for (size_t t = 0; t < facs.size(); ++t) {
                    Int Pe = ipow(facs[t].first, facs[t].second);
                    v = crt2(v, m, pick(locals[t]).at(i, j), Pe);
                    m *= Pe;
                }
                R.at(i, j) = v;
            }
        return R;
    };
    IMat Mout = combine([](const LocalReduction& l) -> const IMat& { return l.Mout; });
    IMat Abar = combine([](const LocalReduction& l) -> const IMat& { return l.A; });
    IMat Bbar = combine([](const LocalReduction& l) -> const IMat& { return l.B; });
    IMat Dbar = combine([](const LocalReduction& l) -> const IMat& { return l.D; });

    IMat G = IMat::identity(n);
    if (!facs.empty()) {
        std::vector<ModMatrix> targets;
        for (size_t t = 0; t < facs.size(); ++t)
            targets.push_back(ModMatrix(ipow(facs[t].first, facs[t].second), locals[t].G));
        G = lift_special(targets);
    }
    IMat beta = facs.empty() ? IMat::identity(2 * n) : sp_lift_gamma0(N, Abar, Bbar, Dbar);

    // Verify the coset pair identity G (M_in I) beta == (Mout I) mod N.
    {
        IMat bA(n, n), bB(n, n), bC(n, n), bD(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                bA.at(i, j) = beta.at(i, j);
                bB.at(i, j) = beta.at(i, n + j);
                bC.at(i, j) = beta.at(n + i, j);
                bD.at(i, j) = beta.at(n + i, n + j);
            }
        IMat Mi = M_in.as_imat();
        IMat left = (G * (Mi * bA + bC)).reduced(N);
        IMat right = (G * (Mi * bB + bD)).reduced(N);
        if (!right.congruent(IMat::identity(n), N) || !left.congruent(Mout, N))
            throw std::logic_error("reduce_cusp: witness identity failed");
        if (!in_gamma0(beta, N)) throw std::logic_error("reduce_cusp: beta not in Gamma_0(N)");
    }

    CuspReduction res;
    res.rep.n = n;
    res.rep.N = N;
    SymIntMat M(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) M.set(i, j, mod_reduce(Mout.at(i, j), N));
    res.rep.M = M;
    res.rep.partial = false;
    for (size_t t = 0; t < facs.size(); ++t) {
        SymIntMat loc(n);
        Int Pe = ipow(facs[t].first, facs[t].second);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) loc.set(i, j, mod_reduce(locals[t].Mout.at(i, j), Pe));
        res.rep.profile.push_back({facs[t].first, facs[t].second, locals[t].d, loc});
        if (facs[t].first == 2 && facs[t].second >= 3 && n > 1) res.rep.partial = true;
    }
    res.G = G;
    res.beta = beta;
    return res;
}

} // namespace siegel
