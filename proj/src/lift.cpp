#include "siegel/lift.hpp"

namespace siegel {

namespace {

struct Transvection {
    bool row;   // row op: row_i += c * row_j; col op: col_i += c * col_j
    int i, j;
    Int c;
};

void apply_row(IMat& x, const Int& m, int i, int j, const Int& c) {
    for (int k = 0; k < x.cols; ++k)
        x.at(i, k) = mod_reduce(x.at(i, k) + c * x.at(j, k), m);
}

void apply_col(IMat& x, const Int& m, int i, int j, const Int& c) {
    for (int k = 0; k < x.rows; ++k)
        x.at(k, i) = mod_reduce(x.at(k, i) + c * x.at(k, j), m);
}

// Decompose X in SL_n(Z/M) into transvections and rebuild an integral lift.
IMat sl_lift_mod(const IMat& xin, const Int& m) {
    int n = xin.rows;
    if (n == 1) {
        if (mod_reduce(xin.at(0, 0), m) != mod_reduce(Int(1), m))
            throw std::domain_error("lift_special: 1x1 target not congruent to 1");
        IMat r(1, 1);
        r.at(0, 0) = 1;
        return r;
    }
    IMat x = xin.reduced(m);
    std::vector<Transvection> ops; // in application order
    auto rec_row = [&](int i, int j, const Int& c) {
        if (c % m == 0) return;
        apply_row(x, m, i, j, c);
        ops.push_back({true, i, j, mod_reduce_sym(c, m)});
    };
    auto rec_col = [&](int i, int j, const Int& c) {
        if (c % m == 0) return;
        apply_col(x, m, i, j, c);
        ops.push_back({false, i, j, mod_reduce_sym(c, m)});
    };

    auto primes = factorize(m);
    for (int col = 0; col < n; ++col) {
        if (gcd(x.at(col, col), m) != 1) {
            // Build a unit pivot by CRT-combining rows below.
            std::vector<int> src_for(primes.size(), -1);
            for (size_t pi = 0; pi < primes.size(); ++pi) {
                const Int& p = primes[pi].first;
                if (x.at(col, col) % p != 0) continue;
                for (int i = col + 1; i < n; ++i)
                    if (x.at(i, col) % p != 0) { src_for[pi] = i; break; }
                if (src_for[pi] < 0)
                    throw std::domain_error("lift_special: target singular mod " + m.get_str());
            }
            for (int i = col + 1; i < n; ++i) {
                std::vector<std::pair<Int, Int>> parts;
                bool used = false;
                for (size_t pi = 0; pi < primes.size(); ++pi) {
                    parts.emplace_back(src_for[pi] == i ? 1 : 0, primes[pi].first);
                    used = used || src_for[pi] == i;
                }
                if (used) rec_row(col, i, crt_combine_int(parts));
            }
            if (gcd(x.at(col, col), m) != 1)
                throw std::domain_error("lift_special: target singular mod " + m.get_str());
        }
        Int w = mod_inv(x.at(col, col), m);
        for (int i = 0; i < n; ++i)
            if (i != col) rec_row(i, col, mod_reduce(-x.at(i, col) * w, m));
        for (int j = 0; j < n; ++j)
            if (j != col) rec_col(j, col, mod_reduce(-x.at(col, j) * w, m));
    }
    // X is now diagonal; fold units pairwise: diag(u, v) -> diag(1, u*v).
    for (int i = 0; i + 1 < n; ++i) {
        Int u = x.at(i, i), v = x.at(i + 1, i + 1);
        if (u % m == 1 % m) continue;
        Int ub = mod_inv(u, m);
        // diag(u, v) -> diag(1, u v) by four transvections:
        rec_col(i + 1, i, ub);                       // [[u,1],[0,v]]
        rec_col(i, i + 1, mod_reduce(1 - u, m));     // [[1,1],[v-uv,v]]
        rec_col(i + 1, i, Int(-1));                  // [[1,0],[v-uv,uv]]
        rec_row(i + 1, i, mod_reduce(u * v - v, m)); // [[1,0],[0,uv]]
    }
    if (!x.is_identity() && !x.congruent(IMat::identity(n), m))
        throw std::domain_error("lift_special: determinant not congruent to 1");
    // L_s...L_1 * X * R_1...R_t == I, so X == L_1^-1...L_s^-1 * R_t^-1...R_1^-1.
    IMat left = IMat::identity(n), right = IMat::identity(n);
    for (const auto& op : ops) {
        IMat t = IMat::identity(n);
        t.at(op.row ? op.i : op.j, op.row ? op.j : op.i) = -op.c;
        if (op.row) left = left * t;       // L1^-1 * L2^-1 * ...
        else right = t * right;            // ... * R2^-1 * R1^-1
    }
    return left * right;
}

} // namespace

IMat lift_special(const std::vector<ModMatrix>& targets) {
    if (targets.empty()) throw std::invalid_argument("lift_special: no targets");
    ModMatrix combined = crt_combine(targets);
    if (combined.a.rows != combined.a.cols)
        throw std::invalid_argument("lift_special: targets not square");
    IMat g = sl_lift_mod(combined.a, combined.m);
    if (g.det() != 1) throw std::logic_error("lift_special: internal determinant error");
    if (!g.congruent(combined.a, combined.m))
        throw std::logic_error("lift_special: internal congruence error");
    return g;
}

IMat lift_special(const ModMatrix& target) {
    return lift_special(std::vector<ModMatrix>{target});
}

IMat lift_unimodular(const std::vector<ModMatrix>& targets) {
    ModMatrix combined = crt_combine(targets);
    int n = combined.a.rows;
    Int d = mod_reduce(combined.a.det(), combined.m);
    if (d == mod_reduce(Int(1), combined.m)) return lift_special(combined);
    if (d == mod_reduce(Int(-1), combined.m)) {
        IMat flip = IMat::identity(n);
        flip.at(n - 1, n - 1) = -1;
        // target = flip * (flip * target), det(flip * target) == 1
        return flip * lift_special(ModMatrix(combined.m, flip * combined.a));
    }
    throw std::domain_error("lift_unimodular: determinant not +-1 mod modulus");
}

IMat sp_lift_gamma0(const Int& N, const IMat& Abar, const IMat& Bbar, const IMat& Dbar) {
    int n = Abar.rows;
    IMat At = Abar.transpose();
    if (!(Abar * Dbar.transpose()).congruent(IMat::identity(n), N))
        throw std::invalid_argument("sp_lift_gamma0: A tD != I mod N");
    IMat S = Bbar * At; // == B D^-1, symmetric mod N
    if (!S.congruent(S.transpose(), N))
        throw std::invalid_argument("sp_lift_gamma0: B tA not symmetric mod N");
    // Symmetric integral representative of S.
    IMat Ssym(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Ssym.at(i, j) = mod_reduce(S.at(j < i ? j : i, j < i ? i : j), N);

    Int u = mod_reduce(Dbar.det(), N);
    Int ub = mod_inv(u, N);
    IMat D1bar = Dbar;
    for (int i = 0; i < n; ++i) D1bar.at(i, n - 1) = mod_reduce(D1bar.at(i, n - 1) * ub, N);
    IMat D1 = lift_special(ModMatrix(N, D1bar));
    IMat D1it = D1.inv_mod(N).transpose(); // used mod N only in checks
    // Exact integral inverse-transpose of D1 (det 1 => adjugate is integral).
    IMat D1invT;
    {
        auto [adj, det] = [&]() {
            SymIntMat dummy(0);
            (void)dummy;
            // adjugate of D1 via cofactors
            IMat a = D1;
            IMat adjm(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    IMat minor(n - 1, n - 1);
                    for (int r = 0, rr = 0; r < n; ++r) {
                        if (r == j) continue;
                        for (int c = 0, cc = 0; c < n; ++c) {
                            if (c == i) continue;
                            minor.at(rr, cc) = a.at(r, c);
                            ++cc;
                        }
                        ++rr;
                    }
                    Int cof = minor.det();
                    adjm.at(i, j) = ((i + j) % 2 == 0) ? cof : -cof;
                }
            return std::make_pair(adjm, a.det());
        }();
        if (det != 1) throw std::logic_error("sp_lift_gamma0: D1 not special");
        D1invT = adj.transpose();
    }
    (void)D1it;

    // Assemble beta = U(Ssym) * torus(D1) * embed(V) with V in SL_2(Z),
    // V == [[ub,0],[0,u]] mod N acting on the last symplectic coordinate.
    auto embed_block = [&](const IMat& A, const IMat& B, const IMat& C, const IMat& D) {
        IMat g(2 * n, 2 * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                g.at(i, j) = A.at(i, j);
                g.at(i, n + j) = B.at(i, j);
                g.at(n + i, j) = C.at(i, j);
                g.at(n + i, n + j) = D.at(i, j);
            }
        return g;
    };
    IMat Z(n, n);
    IMat US = embed_block(IMat::identity(n), Ssym, Z, IMat::identity(n));
    IMat T1 = embed_block(D1invT, Z, Z, D1);
    IMat V2bar(2, 2);
    V2bar.at(0, 0) = ub;
    V2bar.at(1, 1) = u;
    IMat V = lift_special(ModMatrix(N, V2bar));
    IMat T2 = IMat::identity(2 * n);
    T2.at(n - 1, n - 1) = V.at(0, 0);
    T2.at(n - 1, 2 * n - 1) = V.at(0, 1);
    T2.at(2 * n - 1, n - 1) = V.at(1, 0);
    T2.at(2 * n - 1, 2 * n - 1) = V.at(1, 1);
    IMat beta = US * T1 * T2;
    return beta;
}

} // namespace siegel
