#include "siegel/symplectic.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>

namespace siegel {

bool is_symplectic(const IMat& g) {
    if (g.rows != g.cols || g.rows % 2 != 0) return false;
    int n = g.rows / 2;
    auto blk = [&](int bi, int bj) {
        IMat b(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) b.at(i, j) = g.at(bi * n + i, bj * n + j);
        return b;
    };
    IMat A = blk(0, 0), B = blk(0, 1), C = blk(1, 0), D = blk(1, 1);
    IMat AtB = A * B.transpose();
    IMat CtD = C * D.transpose();
    if (AtB != AtB.transpose()) return false;
    if (CtD != CtD.transpose()) return false;
    return A * D.transpose() - B * C.transpose() == IMat::identity(n);
}

bool in_gamma0(const IMat& g, const Int& N) {
    if (!is_symplectic(g)) return false;
    int n = g.rows / 2;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (mod_reduce(g.at(n + i, j), N) != 0) return false;
    return true;
}

IMat gamma_of(const SymIntMat& M) {
    int n = M.n;
    IMat g = IMat::identity(2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g.at(n + i, j) = M.at(i, j);
    return g;
}

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Open-addressing set of packed elements (linear probing).
class FlatSet {
  public:
    explicit FlatSet(size_t expected) {
        size_t cap = 16;
        while (cap < expected * 2) cap <<= 1;
        mask_ = cap - 1;
        slot_.assign(cap, EMPTY);
    }
    bool insert(uint64_t v) { // true if newly inserted; v != EMPTY
        size_t i = splitmix64(v) & mask_;
        while (slot_[i] != EMPTY) {
            if (slot_[i] == v) return false;
            i = (i + 1) & mask_;
        }
        slot_[i] = v;
        return true;
    }

  private:
    static constexpr uint64_t EMPTY = ~0ULL;
    std::vector<uint64_t> slot_;
    size_t mask_ = 0;
};

Int sp_order(int n, long N) {
    // |Sp_n(Z/N)| = N^{n(2n+1)} prod_{p|N} prod_{i=1}^n (1 - p^{-2i})
    Rat ord = 1;
    Int Nz(N);
    for (int i = 0; i < n * (2 * n + 1); ++i) ord *= Nz;
    for (auto& [p, e] : factorize(Nz)) {
        (void)e;
        Rat pr(p);
        Rat pk = 1;
        for (int i = 1; i <= n; ++i) {
            pk /= pr * pr;
            ord *= (Rat(1) - pk);
        }
    }
    Rat r = ord;
    r.canonicalize();
    if (r.get_den() != 1) throw std::logic_error("sp_order: non-integral");
    return r.get_num();
}

long oracle_cap() {
    if (const char* s = std::getenv("SIEGEL_ORACLE_CAP")) {
        long v = std::atol(s);
        if (v > 0) return v;
    }
    return 10000000L;
}

} // namespace

uint64_t SpOracle::pack(const IMat& g) const {
    uint64_t v = 0;
    int k = 0;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j, ++k)
            v |= uint64_t(mod_reduce(g.at(i, j), N_).get_ui()) << (k * bits_);
    return v;
}

IMat SpOracle::unpack(uint64_t v) const {
    IMat g(dim_, dim_);
    uint64_t m = (1ULL << bits_) - 1;
    int k = 0;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j, ++k) g.at(i, j) = long((v >> (k * bits_)) & m);
    return g;
}

uint64_t SpOracle::mul(uint64_t a, uint64_t b) const {
    uint64_t m = (1ULL << bits_) - 1;
    unsigned av[16], bv[16];
    for (int k = 0; k < dim_ * dim_; ++k) {
        av[k] = unsigned((a >> (k * bits_)) & m);
        bv[k] = unsigned((b >> (k * bits_)) & m);
    }
    uint64_t out = 0;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) {
            unsigned s = 0;
            for (int k = 0; k < dim_; ++k) s += av[i * dim_ + k] * bv[k * dim_ + j];
            out |= uint64_t(mod_tab_[s]) << ((i * dim_ + j) * bits_);
        }
    return out;
}

size_t SpOracle::index_of(uint64_t v) const {
    size_t i = splitmix64(v) & idx_mask_;
    while (idx_key_[i] != ~0ULL) {
        if (idx_key_[i] == v) return idx_val_[i];
        i = (i + 1) & idx_mask_;
    }
    throw std::domain_error("oracle: element not in group");
}

void SpOracle::build_index() {
    size_t cap = 16;
    while (cap < elems_.size() * 2) cap <<= 1;
    idx_mask_ = cap - 1;
    idx_key_.assign(cap, ~0ULL);
    idx_val_.assign(cap, 0);
    for (size_t k = 0; k < elems_.size(); ++k) {
        size_t i = splitmix64(elems_[k]) & idx_mask_;
        while (idx_key_[i] != ~0ULL) i = (i + 1) & idx_mask_;
        idx_key_[i] = elems_[k];
        idx_val_[i] = uint32_t(k);
    }
}

std::vector<uint64_t> SpOracle::sp_generators() const {
    std::vector<uint64_t> gens;
    int n = n_;
    // T_B over a basis of symmetric matrices.
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            IMat g = IMat::identity(dim_);
            g.at(i, n + j) = 1;
            g.at(j, n + i) = 1;
            gens.push_back(pack(g));
        }
    // The symplectic involution.
    {
        IMat g(dim_, dim_);
        for (int i = 0; i < n; ++i) {
            g.at(i, n + i) = -1;
            g.at(n + i, i) = 1;
        }
        gens.push_back(pack(g));
    }
    // Torus elements diag(U, tU^{-1}) for GL generators.
    for (uint64_t t : parabolic_generators(false)) gens.push_back(t);
    return gens;
}

std::vector<uint64_t> SpOracle::parabolic_generators(bool det_pm1) const {
    std::vector<uint64_t> gens;
    int n = n_;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            IMat g = IMat::identity(dim_);
            g.at(i, n + j) = 1;
            g.at(j, n + i) = 1;
            gens.push_back(pack(g));
        }
    auto push_torus = [&](const IMat& U) {
        IMat g(dim_, dim_);
        IMat Uinv = U.inv_mod(N_);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                g.at(i, j) = U.at(i, j);
                g.at(n + i, n + j) = Uinv.at(j, i); // tU^{-1}
            }
        gens.push_back(pack(g));
    };
    if (n == 1) {
        IMat U(1, 1);
        if (det_pm1) {
            U.at(0, 0) = -1;
            push_torus(U);
        } else {
            for (long u = 1; u < N_; ++u)
                if (gcd(Int(u), Int(N_)) == 1) {
                    U.at(0, 0) = u;
                    push_torus(U);
                }
        }
    } else {
        IMat U = IMat::identity(n);
        U.at(0, 1) = 1;
        push_torus(U);
        U = IMat::identity(n);
        U.at(1, 0) = 1;
        push_torus(U);
        if (det_pm1) {
            U = IMat::identity(n);
            U.at(0, 0) = -1;
            push_torus(U);
        } else {
            for (long u = 1; u < N_; ++u)
                if (gcd(Int(u), Int(N_)) == 1) {
                    U = IMat::identity(n);
                    U.at(0, 0) = u;
                    push_torus(U);
                }
        }
    }
    return gens;
}

SpOracle::SpOracle(int n, long N) : n_(n), dim_(2 * n), N_(N) {
    if (n != 1 && n != 2) throw std::invalid_argument("oracle: n must be 1 or 2");
    if (N < 2) throw std::invalid_argument("oracle: N must be >= 2");
    bits_ = (n == 1) ? 6 : 3;
    if (N >= (1L << bits_)) throw std::domain_error("oracle scale exceeded");
    mod_tab_.resize(size_t(dim_) * (N - 1) * (N - 1) + 1);
    for (size_t s = 0; s < mod_tab_.size(); ++s) mod_tab_[s] = uint8_t(s % N);
    Int expected = sp_order(n, N);
    if (expected > oracle_cap()) throw std::domain_error("oracle scale exceeded");
    size_t target = expected.get_ui();

    FlatSet seen(target);
    auto gens = sp_generators();
    std::vector<uint64_t> frontier;
    uint64_t id = pack(IMat::identity(dim_));
    seen.insert(id);
    frontier.push_back(id);
    elems_.reserve(target);
    elems_.push_back(id);
    while (!frontier.empty()) {
        std::vector<uint64_t> next;
        for (uint64_t x : frontier)
            for (uint64_t g : gens) {
                uint64_t y = mul(x, g);
                if (seen.insert(y)) {
                    next.push_back(y);
                    elems_.push_back(y);
                }
            }
        frontier = std::move(next);
    }
    if (elems_.size() != target) throw std::logic_error("oracle: order formula mismatch");
    std::sort(elems_.begin(), elems_.end());
    build_index();
}

void SpOracle::fill_cosets() {
    if (ncosets_ >= 0) return;
    coset_.assign(elems_.size(), -1);
    auto lgens = parabolic_generators(true);
    auto rgens = parabolic_generators(false);
    int id = 0;
    std::vector<uint64_t> frontier;
    for (size_t start = 0; start < elems_.size(); ++start) {
        if (coset_[start] >= 0) continue;
        coset_[start] = id;
        frontier.clear();
        frontier.push_back(elems_[start]);
        while (!frontier.empty()) {
            uint64_t x = frontier.back();
            frontier.pop_back();
            auto visit = [&](uint64_t y) {
                size_t yi = index_of(y);
                if (coset_[yi] < 0) {
                    coset_[yi] = id;
                    frontier.push_back(y);
                }
            };
            for (uint64_t g : lgens) visit(mul(g, x));
            for (uint64_t g : rgens) visit(mul(x, g));
        }
        ++id;
    }
    ncosets_ = id;
}

int SpOracle::double_coset_count() {
    fill_cosets();
    return ncosets_;
}

int SpOracle::coset_of(const IMat& g) {
    fill_cosets();
    return coset_[index_of(pack(g))];
}

bool SpOracle::equivalent(const SymIntMat& M1, const SymIntMat& M2) {
    if (M1.n != n_ || M2.n != n_) throw std::invalid_argument("oracle: dimension mismatch");
    return coset_of(gamma_of(M1)) == coset_of(gamma_of(M2));
}

std::vector<IMat> SpOracle::orbit_reps() {
    fill_cosets();
    std::vector<IMat> reps(ncosets_);
    std::vector<bool> have(ncosets_, false);
    for (size_t i = 0; i < elems_.size(); ++i) {
        int c = coset_[i];
        if (!have[c]) {
            have[c] = true;
            reps[c] = unpack(elems_[i]);
        }
    }
    return reps;
}

IMat SpOracle::element(size_t i) const { return unpack(elems_.at(i)); }

} // namespace siegel
