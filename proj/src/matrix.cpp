#include "siegel/matrix.hpp"

namespace siegel {

IMat IMat::identity(int n) {
    IMat r(n, n);
    for (int i = 0; i < n; ++i) r.at(i, i) = 1;
    return r;
}

IMat IMat::transpose() const {
    IMat r(cols, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) r.at(j, i) = at(i, j);
    return r;
}

IMat IMat::operator*(const IMat& o) const {
    if (cols != o.rows) throw std::invalid_argument("IMat: dimension mismatch in *");
    IMat r(rows, o.cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k) {
            const Int& v = at(i, k);
            if (v == 0) continue;
            for (int j = 0; j < o.cols; ++j) r.at(i, j) += v * o.at(k, j);
        }
    return r;
}

IMat IMat::operator+(const IMat& o) const {
    if (rows != o.rows || cols != o.cols) throw std::invalid_argument("IMat: dimension mismatch in +");
    IMat r(rows, cols);
    for (size_t i = 0; i < e.size(); ++i) r.e[i] = e[i] + o.e[i];
    return r;
}

IMat IMat::operator-(const IMat& o) const {
    if (rows != o.rows || cols != o.cols) throw std::invalid_argument("IMat: dimension mismatch in -");
    IMat r(rows, cols);
    for (size_t i = 0; i < e.size(); ++i) r.e[i] = e[i] - o.e[i];
    return r;
}

IMat IMat::reduced(const Int& m) const {
    IMat r(rows, cols);
    for (size_t i = 0; i < e.size(); ++i) r.e[i] = mod_reduce(e[i], m);
    return r;
}

bool IMat::congruent(const IMat& o, const Int& m) const {
    if (rows != o.rows || cols != o.cols) return false;
    for (size_t i = 0; i < e.size(); ++i)
        if ((e[i] - o.e[i]) % m != 0) return false;
    return true;
}

bool IMat::is_identity() const {
    if (rows != cols) return false;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (at(i, j) != (i == j ? 1 : 0)) return false;
    return true;
}

// Fraction-free Gaussian elimination (Bareiss).
Int IMat::det() const {
    if (rows != cols) throw std::invalid_argument("IMat::det: not square");
    int n = rows;
    if (n == 0) return 1;
    IMat a = *this;
    Int prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (a.at(k, k) == 0) {
            int piv = -1;
            for (int i = k + 1; i < n; ++i)
                if (a.at(i, k) != 0) { piv = i; break; }
            if (piv < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(piv, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                a.at(i, j) = (a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j)) / prev;
        prev = a.at(k, k);
    }
    return sign * a.at(n - 1, n - 1);
}

IMat IMat::inv_mod(const Int& m) const {
    if (rows != cols) throw std::invalid_argument("IMat::inv_mod: not square");
    int n = rows;
    IMat a = reduced(m), inv = IMat::identity(n);
    for (int col = 0; col < n; ++col) {
        // Find a row with entry invertible mod m; combine rows if needed.
        int piv = -1;
        for (int i = col; i < n; ++i) {
            if (gcd(a.at(i, col), m) == 1) { piv = i; break; }
        }
        if (piv < 0) {
            // No single row works: build a unit pivot by adding, for each prime
            // p | m dividing a(col,col), one row whose entry survives mod p.
            // Coefficients are chosen by CRT so the fixes do not interfere.
            auto primes = factorize(m);
            std::vector<int> src_for(primes.size(), -1);
            for (size_t pi = 0; pi < primes.size(); ++pi) {
                const Int& p = primes[pi].first;
                if (a.at(col, col) % p != 0) continue;
                for (int i = col + 1; i < n; ++i)
                    if (a.at(i, col) % p != 0) { src_for[pi] = i; break; }
                if (src_for[pi] < 0) throw std::domain_error("IMat::inv_mod: singular mod " + m.get_str());
            }
            std::vector<Int> coef(n, Int(0));
            for (int i = col + 1; i < n; ++i) {
                std::vector<std::pair<Int, Int>> parts;
                for (size_t pi = 0; pi < primes.size(); ++pi)
                    parts.emplace_back(src_for[pi] == i ? 1 : 0, primes[pi].first);
                coef[i] = crt_combine_int(parts);
            }
            for (int i = col; i < n; ++i) {
                if (coef[i] == 0) continue;
                for (int j = 0; j < n; ++j) {
                    a.at(col, j) = mod_reduce(a.at(col, j) + coef[i] * a.at(i, j), m);
                    inv.at(col, j) = mod_reduce(inv.at(col, j) + coef[i] * inv.at(i, j), m);
                }
            }
            if (gcd(a.at(col, col), m) == 1) piv = col;
            else throw std::domain_error("IMat::inv_mod: singular mod " + m.get_str());
        }
        if (piv != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(a.at(col, j), a.at(piv, j));
                std::swap(inv.at(col, j), inv.at(piv, j));
            }
        }
        Int w = mod_inv(a.at(col, col), m);
        for (int j = 0; j < n; ++j) {
            a.at(col, j) = mod_reduce(a.at(col, j) * w, m);
            inv.at(col, j) = mod_reduce(inv.at(col, j) * w, m);
        }
        for (int i = 0; i < n; ++i) {
            if (i == col || a.at(i, col) == 0) continue;
            Int f = a.at(i, col);
            for (int j = 0; j < n; ++j) {
                a.at(i, j) = mod_reduce(a.at(i, j) - f * a.at(col, j), m);
                inv.at(i, j) = mod_reduce(inv.at(i, j) - f * inv.at(col, j), m);
            }
        }
    }
    return inv;
}

SymIntMat::SymIntMat(int dim, std::initializer_list<long> vals) : SymIntMat(dim) {
    if ((int)vals.size() != dim * dim) throw std::invalid_argument("SymIntMat: bad initializer size");
    auto it = vals.begin();
    for (size_t i = 0; i < e.size(); ++i) e[i] = Int(*it++);
    if (!is_symmetric()) throw std::invalid_argument("SymIntMat: initializer not symmetric");
}

SymIntMat SymIntMat::from_imat(const IMat& m) {
    if (m.rows != m.cols) throw std::invalid_argument("SymIntMat: not square");
    SymIntMat s(m.rows);
    s.e = m.e;
    if (!s.is_symmetric()) throw std::invalid_argument("SymIntMat: not symmetric");
    return s;
}

IMat SymIntMat::as_imat() const {
    IMat m(n, n);
    m.e = e;
    return m;
}

SymIntMat SymIntMat::reduced(const Int& m) const {
    SymIntMat r(n);
    for (size_t i = 0; i < e.size(); ++i) r.e[i] = mod_reduce(e[i], m);
    return r;
}

bool SymIntMat::congruent(const SymIntMat& o, const Int& m) const {
    return as_imat().congruent(o.as_imat(), m);
}

bool SymIntMat::is_symmetric() const {
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (at(i, j) != at(j, i)) return false;
    return true;
}

Int SymIntMat::det() const { return as_imat().det(); }

std::pair<SymIntMat, Int> SymIntMat::inverse_times_det() const {
    Int d = det();
    if (d == 0) throw std::domain_error("SymIntMat: singular");
    // Adjugate via cofactors (dimensions here are small, <= 8).
    IMat adj(n, n);
    IMat a = as_imat();
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
            adj.at(i, j) = ((i + j) % 2 == 0) ? cof : -cof;
        }
    return {SymIntMat::from_imat(adj), d};
}

SymIntMat SymIntMat::conj(const IMat& g) const {
    return SymIntMat::from_imat(g.transpose() * as_imat() * g);
}

SymIntMat SymIntMat::dsum(const SymIntMat& o) const {
    SymIntMat r(n + o.n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.at(i, j) = at(i, j);
    for (int i = 0; i < o.n; ++i)
        for (int j = 0; j < o.n; ++j) r.at(n + i, n + j) = o.at(i, j);
    return r;
}

SymIntMat SymIntMat::scaled(const Int& c) const {
    SymIntMat r(n);
    for (size_t i = 0; i < e.size(); ++i) r.e[i] = c * e[i];
    return r;
}

bool is_even_integral(const SymIntMat& s) {
    for (int i = 0; i < s.n; ++i)
        if (s.at(i, i) % 2 != 0) return false;
    return true;
}

static nlohmann::json int_to_json(const Int& v) {
    if (v.fits_slong_p()) return v.get_si();
    return v.get_str();
}

static Int int_from_json(const nlohmann::json& j) {
    if (j.is_string()) return Int(j.get<std::string>());
    return Int(static_cast<long>(j.get<long long>()));
}

nlohmann::json to_json(const IMat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols; ++j) row.push_back(int_to_json(m.at(i, j)));
        rows.push_back(row);
    }
    return {{"n", m.rows}, {"entries", rows}};
}

nlohmann::json to_json(const SymIntMat& m) { return to_json(m.as_imat()); }

IMat imat_from_json(const nlohmann::json& j) {
    const auto& rows = j.at("entries");
    int r = rows.size();
    int c = r ? (int)rows[0].size() : 0;
    IMat m(r, c);
    for (int i = 0; i < r; ++i) {
        if ((int)rows[i].size() != c) throw std::invalid_argument("matrix json: ragged rows");
        for (int k = 0; k < c; ++k) m.at(i, k) = int_from_json(rows[i][k]);
    }
    if (j.contains("n") && j.at("n").get<int>() != r)
        throw std::invalid_argument("matrix json: dimension mismatch");
    return m;
}

SymIntMat symmat_from_json(const nlohmann::json& j) {
    return SymIntMat::from_imat(imat_from_json(j));
}

ModMatrix crt_combine(const std::vector<ModMatrix>& parts) {
    if (parts.empty()) throw std::invalid_argument("crt_combine: empty input");
    ModMatrix acc = parts[0];
    for (size_t i = 1; i < parts.size(); ++i) {
        const ModMatrix& p = parts[i];
        if (acc.a.rows != p.a.rows || acc.a.cols != p.a.cols)
            throw std::invalid_argument("crt_combine: shape mismatch");
        if (gcd(acc.m, p.m) != 1) throw std::invalid_argument("moduli not coprime");
        IMat r(acc.a.rows, acc.a.cols);
        for (size_t k = 0; k < r.e.size(); ++k)
            r.e[k] = crt2(acc.a.e[k], acc.m, p.a.e[k], p.m);
        acc = ModMatrix(acc.m * p.m, r);
    }
    return acc;
}

Int crt_combine_int(const std::vector<std::pair<Int, Int>>& parts) {
    if (parts.empty()) throw std::invalid_argument("crt_combine: empty input");
    Int v = mod_reduce(parts[0].first, parts[0].second), m = parts[0].second;
    for (size_t i = 1; i < parts.size(); ++i) {
        if (gcd(m, parts[i].second) != 1) throw std::invalid_argument("moduli not coprime");
        v = crt2(v, m, parts[i].first, parts[i].second);
        m *= parts[i].second;
    }
    return v;
}

} // namespace siegel
