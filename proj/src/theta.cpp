#include "siegel/theta.hpp"

#include "siegel/localforms.hpp"

#include <cmath>
#include <unordered_map>

namespace siegel {

namespace {

constexpr double PI = 3.141592653589793238462643383279502884;

struct LDL {
    std::vector<std::vector<Rat>> L; // unit lower triangular
    std::vector<Rat> D;
};

LDL ldl_decompose(const SymIntMat& Q) {
    int m = Q.n;
    std::vector<std::vector<Rat>> A(size_t(m), std::vector<Rat>(size_t(m), Rat(0)));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) A[size_t(i)][size_t(j)] = Rat(Q.at(i, j));
    LDL out;
    out.L.assign(size_t(m), std::vector<Rat>(size_t(m), Rat(0)));
    out.D.assign(size_t(m), Rat(0));
    for (int i = 0; i < m; ++i) {
        out.L[size_t(i)][size_t(i)] = 1;
        Rat d = A[size_t(i)][size_t(i)];
        for (int k = 0; k < i; ++k) {
            Rat l = out.L[size_t(i)][size_t(k)];
            d -= l * l * out.D[size_t(k)];
        }
        if (d <= 0) throw std::invalid_argument("theta: Q is not positive definite");
        out.D[size_t(i)] = d;
        for (int j = i + 1; j < m; ++j) {
            Rat s = A[size_t(j)][size_t(i)];
            for (int k = 0; k < i; ++k)
                s -= out.L[size_t(j)][size_t(k)] * out.L[size_t(i)][size_t(k)] *
                     out.D[size_t(k)];
            out.L[size_t(j)][size_t(i)] = s / out.D[size_t(i)];
        }
    }
    return out;
}

// All x in Z^m with Q(x) <= bound (exact), both signs and zero included.
void enumerate_short(const SymIntMat& Q, long bound,
                     const std::function<void(const std::vector<long>&, long)>& emit) {
    int m = Q.n;
    LDL F = ldl_decompose(Q);
    std::vector<std::vector<double>> L(size_t(m), std::vector<double>(size_t(m), 0.0));
    std::vector<double> D(size_t(m), 0.0);
    for (int i = 0; i < m; ++i) {
        D[size_t(i)] = to_double(F.D[size_t(i)]);
        for (int j = 0; j < m; ++j) L[size_t(i)][size_t(j)] = to_double(F.L[size_t(i)][size_t(j)]);
    }
    std::vector<long> x(size_t(m), 0);
    // Q(x) = sum_i D_i (x_i + sum_{j > i} L_{ji} x_j)^2, recurse top down from i = m-1.
    std::function<void(int, double)> rec = [&](int i, double budget) {
        if (i < 0) {
            // Exact final check (entries are small; long arithmetic is exact).
            long v = 0;
            for (int a = 0; a < m; ++a) {
                long row = 0;
                for (int b = 0; b < m; ++b)
                    row += Q.at(a, b).get_si() * x[size_t(b)];
                v += row * x[size_t(a)];
            }
            if (v <= bound) emit(x, v);
            return;
        }
        double center = 0;
        for (int j = i + 1; j < m; ++j) center += L[size_t(j)][size_t(i)] * x[size_t(j)];
        double half = std::sqrt(std::max(0.0, budget) / D[size_t(i)]) + 1e-9;
        long lo = long(std::ceil(-center - half)), hi = long(std::floor(-center + half));
        for (long v = lo; v <= hi; ++v) {
            x[size_t(i)] = v;
            double t = v + center;
            rec(i - 1, budget - D[size_t(i)] * t * t);
        }
        x[size_t(i)] = 0;
    };
    rec(m - 1, double(bound) + 1e-6);
}

std::vector<std::vector<int>> z_components(const SymIntMat& Q) {
    int m = Q.n;
    std::vector<int> seen(size_t(m), 0);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < m; ++s) {
        if (seen[size_t(s)]) continue;
        std::vector<int> stack{s}, mem;
        seen[size_t(s)] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            mem.push_back(v);
            for (int w = 0; w < m; ++w)
                if (!seen[size_t(w)] && Q.at(v, w) != 0) {
                    seen[size_t(w)] = 1;
                    stack.push_back(w);
                }
        }
        std::sort(mem.begin(), mem.end());
        out.push_back(mem);
    }
    return out;
}

} // namespace

CMat CMat::identity(int n) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

CMat CMat::from_imat(const IMat& a) {
    CMat m(a.rows, a.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) m.at(i, j) = a.at(i, j).get_d();
    return m;
}

CMat CMat::scaled_identity(int n, std::complex<double> v) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = v;
    return m;
}

CMat CMat::operator*(const CMat& o) const {
    CMat r(rows, o.cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k)
            for (int j = 0; j < o.cols; ++j) r.at(i, j) += at(i, k) * o.at(k, j);
    return r;
}

CMat CMat::operator+(const CMat& o) const {
    CMat r = *this;
    for (size_t i = 0; i < e.size(); ++i) r.e[i] += o.e[i];
    return r;
}

CMat CMat::transpose() const {
    CMat r(cols, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) r.at(j, i) = at(i, j);
    return r;
}

std::complex<double> CMat::det() const {
    CMat a = *this;
    int n = rows;
    std::complex<double> d = 1.0;
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a.at(r, c)) > std::abs(a.at(p, c))) p = r;
        if (std::abs(a.at(p, c)) < 1e-14) return 0.0;
        if (p != c) {
            for (int j = 0; j < n; ++j) std::swap(a.at(p, j), a.at(c, j));
            d = -d;
        }
        d *= a.at(c, c);
        for (int r = c + 1; r < n; ++r) {
            auto f = a.at(r, c) / a.at(c, c);
            for (int j = c; j < n; ++j) a.at(r, j) -= f * a.at(c, j);
        }
    }
    return d;
}

CMat CMat::inverse() const {
    int n = rows;
    CMat a = *this, inv = identity(n);
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a.at(r, c)) > std::abs(a.at(p, c))) p = r;
        if (std::abs(a.at(p, c)) < 1e-14)
            throw std::domain_error("CMat::inverse: singular matrix");
        if (p != c)
            for (int j = 0; j < n; ++j) {
                std::swap(a.at(p, j), a.at(c, j));
                std::swap(inv.at(p, j), inv.at(c, j));
            }
        auto piv = a.at(c, c);
        for (int j = 0; j < n; ++j) {
            a.at(c, j) /= piv;
            inv.at(c, j) /= piv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            auto f = a.at(r, c);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                a.at(r, j) -= f * a.at(c, j);
                inv.at(r, j) -= f * inv.at(c, j);
            }
        }
    }
    return inv;
}

bool in_siegel_space(const CMat& tau) {
    int n = tau.rows;
    if (tau.cols != n) return false;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::abs(tau.at(i, j) - tau.at(j, i)) > 1e-12) return false;
    // Positive definite imaginary part via leading minors (n <= 2 in practice).
    if (n == 1) return tau.at(0, 0).imag() > 0;
    double a = tau.at(0, 0).imag(), b = tau.at(0, 1).imag(), c = tau.at(1, 1).imag();
    if (n == 2) return a > 0 && a * c - b * b > 0;
    return a > 0; // coarse for n > 2 (unused)
}

ThetaSeries theta_coeffs(const SymIntMat& Q, int n, long bound) {
    if (n < 1 || n > 2) throw std::invalid_argument("theta_coeffs: n must be 1 or 2");
    if (bound < 0) throw std::invalid_argument("theta_coeffs: bound must be >= 0");
    ThetaSeries ts;
    ts.Q = Q;
    ts.n = n;
    ts.bound = bound;
    if (n == 1) {
        std::map<long, Int> hist;
        enumerate_short(Q, bound, [&](const std::vector<long>&, long v) { hist[v] += 1; });
        for (auto& [t, c] : hist) ts.coeffs[{t}] = c;
        return ts;
    }
    // n = 2: assemble pairs from the short-vector list.
    std::vector<std::vector<long>> vecs;
    std::vector<long> norms;
    enumerate_short(Q, bound, [&](const std::vector<long>& x, long v) {
        vecs.push_back(x);
        norms.push_back(v);
    });
    if (double(vecs.size()) * double(vecs.size()) > 2.5e8)
        throw std::runtime_error("theta_coeffs: scale exceeded for n = 2");
    int m = Q.n;
    std::unordered_map<long long, long long> acc;
    for (size_t i = 0; i < vecs.size(); ++i) {
        // Qx for fast inner products.
        std::vector<long> Qx(size_t(m), 0);
        for (int a = 0; a < m; ++a) {
            long s = 0;
            for (int b = 0; b < m; ++b) s += long(Q.at(a, b).get_si()) * vecs[i][size_t(b)];
            Qx[size_t(a)] = s;
        }
        for (size_t j = 0; j < vecs.size(); ++j) {
            if (norms[i] + norms[j] > bound) continue;
            long bij = 0;
            for (int a = 0; a < m; ++a) bij += Qx[size_t(a)] * vecs[j][size_t(a)];
            long long key = (static_cast<long long>(norms[i]) << 40) |
                            (static_cast<long long>(norms[j]) << 20) |
                            static_cast<long long>(bij + (1 << 19));
            acc[key] += 1;
        }
    }
    for (auto& [key, cnt] : acc) {
        long a = long(key >> 40);
        long c = long((key >> 20) & 0xFFFFF);
        long b = long(key & 0xFFFFF) - (1 << 19);
        ts.coeffs[{a, b, b, c}] = Int(long(cnt));
    }
    return ts;
}

std::complex<double> theta_eval(const ThetaSeries& ts, const CMat& tau) {
    if (!in_siegel_space(tau)) throw std::invalid_argument("theta_eval: tau not in Siegel space");
    if (tau.rows != ts.n) throw std::invalid_argument("theta_eval: degree mismatch");
    std::complex<double> s = 0.0;
    for (auto& [T, cnt] : ts.coeffs) {
        std::complex<double> tr = 0.0;
        for (int i = 0; i < ts.n; ++i)
            for (int j = 0; j < ts.n; ++j) tr += double(T[size_t(i) * ts.n + j]) * tau.at(j, i);
        s += cnt.get_d() * std::exp(std::complex<double>(0.0, PI) * tr);
    }
    return s;
}

std::complex<double> slash(const std::function<std::complex<double>(const CMat&)>& f,
                           const IMat& gamma, long k, const CMat& tau) {
    int n = tau.rows;
    if (gamma.rows != 2 * n || gamma.cols != 2 * n)
        throw std::invalid_argument("slash: dimension mismatch");
    CMat A(n, n), B(n, n), C(n, n), D(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            A.at(i, j) = gamma.at(i, j).get_d();
            B.at(i, j) = gamma.at(i, n + j).get_d();
            C.at(i, j) = gamma.at(n + i, j).get_d();
            D.at(i, j) = gamma.at(n + i, n + j).get_d();
        }
    CMat den = C * tau + D;
    auto dd = den.det();
    if (std::abs(dd) < 1e-13) throw std::domain_error("slash: C tau + D singular");
    CMat taup = (A * tau + B) * den.inverse();
    return std::pow(dd, -double(k)) * f(taup);
}

std::complex<double> theta_cusp_limit_numeric(const SymIntMat& Q, const SymIntMat& M,
                                              int n, double Y) {
    if (Y <= 0) throw std::invalid_argument("theta_cusp_limit_numeric: Y > 0 required");
    Int N = level(Q);
    long Nl = N.get_si();
    auto [adj, det] = Q.inverse_times_det();
    std::complex<double> total = 1.0;
    for (auto& comp : z_components(Q)) {
        int mc = int(comp.size());
        double cells = std::pow(double(Nl), double(mc) * n);
        if (cells * cells > 5e7)
            throw std::runtime_error("theta_cusp_limit_numeric: scale exceeded");
        long ncell = long(cells + 0.5);
        // B = N Qc^{-1} (integral), Qc the component block.
        std::vector<long> Bc(size_t(mc) * mc), Qc(size_t(mc) * mc);
        for (int a = 0; a < mc; ++a)
            for (int b = 0; b < mc; ++b) {
                Int num = adj.at(comp[size_t(a)], comp[size_t(b)]) * N;
                if (num % det != 0) throw std::logic_error("theta cusp: N Q^{-1} not integral");
                Bc[size_t(a) * mc + b] = Int(num / det).get_si();
                Qc[size_t(a) * mc + b] = Q.at(comp[size_t(a)], comp[size_t(b)]).get_si();
            }
        auto decode = [&](long code, std::vector<long>& U) {
            for (auto& v : U) {
                v = code % Nl;
                code /= Nl;
            }
        };
        // Gaussian tail factor per U1 cell.
        std::vector<std::complex<double>> G(static_cast<size_t>(ncell));
        std::vector<long> U1(size_t(mc) * n);
        for (long c1 = 0; c1 < ncell; ++c1) {
            decode(c1, U1);
            // sum over U in a small box of exp(-pi Y Tr Qc(U1/N + U)).
            double s = 0.0;
            std::vector<long> U(size_t(mc) * n, -3);
            while (true) {
                double tr = 0.0;
                for (int col = 0; col < n; ++col)
                    for (int a = 0; a < mc; ++a)
                        for (int b = 0; b < mc; ++b)
                            tr += (double(U1[size_t(a) * n + col]) / Nl + U[size_t(a) * n + col]) *
                                  Qc[size_t(a) * mc + b] *
                                  (double(U1[size_t(b) * n + col]) / Nl + U[size_t(b) * n + col]);
                s += std::exp(-PI * Y * tr);
                size_t k = 0;
                for (; k < U.size(); ++k) {
                    if (++U[k] <= 3) break;
                    U[k] = -3;
                }
                if (k == U.size()) break;
            }
            G[size_t(c1)] = s;
        }
        std::complex<double> S = 0.0;
        std::vector<long> U0(size_t(mc) * n);
        for (long c0 = 0; c0 < ncell; ++c0) {
            decode(c0, U0);
            // e{Qc^{-1}(U0) M}: angle = pi Tr(tU0 Bc U0 M)/N.
            long t = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    long p = 0;
                    for (int a = 0; a < mc; ++a)
                        for (int b = 0; b < mc; ++b)
                            p += U0[size_t(a) * n + i] * Bc[size_t(a) * mc + b] *
                                 U0[size_t(b) * n + j];
                    t += p * M.at(j, i).get_si();
                }
            std::complex<double> w0 = std::exp(std::complex<double>(0.0, PI * double(t) / Nl));
            for (long c1 = 0; c1 < ncell; ++c1) {
                decode(c1, U1);
                long dot = 0;
                for (size_t idx = 0; idx < U0.size(); ++idx) dot += U0[idx] * U1[idx];
                std::complex<double> w1 =
                    std::exp(std::complex<double>(0.0, -2.0 * PI * double(dot) / Nl));
                S += w0 * w1 * G[size_t(c1)];
            }
        }
        total *= S / cells;
    }
    return total;
}

ExactCoeff theta_cusp_limit_exact(const SymIntMat& Q, const SymIntMat& M, int) {
    return a_total_exact(Q, M, level(Q));
}

} // namespace siegel
