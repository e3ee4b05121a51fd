#include <doctest.h>

#include "siegel/lift.hpp"
#include "siegel/localforms.hpp"

#include <random>

using namespace siegel;

namespace {

SymIntMat two_identity(int n) {
    SymIntMat s(n);
    for (int i = 0; i < n; ++i) s.at(i, i) = 2;
    return s;
}

SymIntMat a2() { return SymIntMat(2, {2, 1, 1, 2}); }

SymIntMat hplane() { return SymIntMat(2, {0, 1, 1, 0}); }

SymIntMat random_sym(std::mt19937& rng, int n, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    SymIntMat s(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) s.set(i, j, d(rng));
    return s;
}

} // namespace

TEST_CASE("modular arithmetic basics") {
    CHECK(mod_reduce(-1, 7) == 6);
    CHECK(mod_reduce_sym(6, 7) == -1);
    CHECK(mod_inv(3, 10) == 7);
    CHECK(mod_pow(2, 10, 1000) == 24);
    CHECK(valuation(24, 2, 10) == 3);
    CHECK(valuation(0, 2, 10) == 10);
    CHECK(crt2(1, 4, 0, 3) == 9);
    CHECK_THROWS(crt2(1, 4, 0, 2));
    CHECK(kronecker(2, 7) == 1);
    CHECK(kronecker(3, 7) == -1);
    CHECK(least_nonresidue(7) == 3);
    CHECK(is_prime(97));
    CHECK(!is_prime(91));
}

TEST_CASE("modular square roots") {
    for (Int q : {Int(3), Int(5), Int(7), Int(13)}) {
        for (Int a = 1; a < q; ++a) {
            if (kronecker(a, q) != 1) continue;
            for (long k : {1L, 2L, 5L}) {
                Int m = 1;
                for (long i = 0; i < k; ++i) m *= q;
                Int r = sqrt_mod_odd(a, q, k);
                CHECK(mod_reduce(r * r, m) == mod_reduce(a, m));
            }
        }
    }
    for (long k : {3L, 4L, 8L}) {
        Int m = Int(1) << k;
        for (Int a = 1; a < m; a += 8) {
            Int r = sqrt_mod_2pow(a, k);
            CHECK(mod_reduce(r * r, m) == a);
        }
    }
    CHECK_THROWS(sqrt_mod_odd(3, 7, 2));
    CHECK_THROWS(sqrt_mod_2pow(3, 3));
}

TEST_CASE("matrix determinant and modular inverse") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> d(-9, 9);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 1 + trial % 4;
        IMat a(n, n);
        for (auto& v : a.e) v = d(rng);
        Int det = a.det();
        for (Int m : {Int(5), Int(8), Int(9), Int(12)}) {
            if (gcd(det, m) != 1) continue;
            IMat inv = a.inv_mod(m);
            CHECK((a * inv).congruent(IMat::identity(n), m));
        }
    }
    IMat sing(2, 2);
    sing.at(0, 0) = 2;
    sing.at(1, 1) = 3;
    CHECK_THROWS(sing.inv_mod(6));
}

TEST_CASE("symmetric matrix helpers") {
    SymIntMat q = a2();
    CHECK(q.det() == 3);
    auto [adj, det] = q.inverse_times_det();
    CHECK(det == 3);
    CHECK(adj.at(0, 0) == 2);
    CHECK(adj.at(0, 1) == -1);
    CHECK(is_even_integral(q));
    SymIntMat odd(1, {1});
    CHECK(!is_even_integral(odd));

    IMat g(2, 2);
    g.at(0, 0) = 1; g.at(0, 1) = 1; g.at(1, 1) = 1;
    SymIntMat c = q.conj(g);
    CHECK(c.at(0, 0) == 2);
    CHECK(c.at(1, 1) == 6);
    CHECK(c.at(0, 1) == 3);
}

TEST_CASE("matrix json round trip") {
    SymIntMat q = a2();
    auto j = to_json(q);
    CHECK(symmat_from_json(j) == q);
    IMat m(2, 3);
    m.at(0, 2) = Int("123456789012345678901234567890");
    m.at(1, 0) = -5;
    CHECK(imat_from_json(to_json(m)) == m);
}

TEST_CASE("crt_combine") {
    IMat a(1, 1), b(1, 1);
    a.at(0, 0) = 1;
    b.at(0, 0) = 0;
    ModMatrix r = crt_combine({ModMatrix(4, a), ModMatrix(3, b)});
    CHECK(r.m == 12);
    CHECK(r.a.at(0, 0) == 9);
    CHECK_THROWS_WITH(crt_combine({ModMatrix(4, a), ModMatrix(6, b)}),
                      doctest::Contains("moduli not coprime"));
}

TEST_CASE("lift_special: example and properties") {
    IMat t(2, 2);
    t.at(0, 0) = 2;
    t.at(1, 1) = 5;
    IMat g = lift_special(ModMatrix(9, t));
    CHECK(g.det() == 1);
    CHECK(g.congruent(t, 9));

    std::mt19937 rng(11);
    std::uniform_int_distribution<int> d(0, 100);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 1 + trial % 3;
        Int m = std::vector<Int>{4, 9, 25, 12, 30, 7}[trial % 6];
        // Random special linear target: product of random transvections.
        IMat x = IMat::identity(n);
        for (int s = 0; s < 6 && n > 1; ++s) {
            IMat tv = IMat::identity(n);
            int i = d(rng) % n, j = d(rng) % n;
            if (i == j) continue;
            tv.at(i, j) = d(rng) % 5;
            x = (x * tv).reduced(m);
        }
        IMat lifted = lift_special(ModMatrix(m, x));
        CHECK(lifted.det() == 1);
        CHECK(lifted.congruent(x, m));
    }
}

TEST_CASE("lift_special: multiple congruences") {
    IMat a = IMat::identity(2), b = IMat::identity(2);
    a.at(0, 1) = 3;
    b.at(1, 0) = 2;
    IMat g = lift_special({ModMatrix(4, a), ModMatrix(9, b)});
    CHECK(g.det() == 1);
    CHECK(g.congruent(a, 4));
    CHECK(g.congruent(b, 9));
}

TEST_CASE("lift_unimodular handles determinant -1") {
    IMat t(2, 2);
    t.at(0, 1) = 1;
    t.at(1, 0) = 1; // det -1
    IMat g = lift_unimodular({ModMatrix(8, t)});
    CHECK(g.det() == -1);
    CHECK(g.congruent(t, 8));
}

TEST_CASE("sp_lift_gamma0 produces symplectic Gamma_0(N) elements") {
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> d(0, 50);
    for (Int N : {Int(4), Int(5), Int(12)}) {
        for (int n : {1, 2}) {
            for (int trial = 0; trial < 10; ++trial) {
                // Random invertible A mod N, random symmetric S; D = tA^{-1}, B = S tA^{-1}.
                IMat A(n, n);
                do {
                    for (auto& v : A.e) v = d(rng);
                } while (gcd(A.det(), N) != 1);
                IMat S(n, n);
                for (int i = 0; i < n; ++i)
                    for (int j = i; j < n; ++j) S.at(i, j) = S.at(j, i) = d(rng);
                IMat D = A.inv_mod(N).transpose();
                IMat B = (S * D).reduced(N);
                IMat beta = sp_lift_gamma0(N, A, B, D);
                // Symplectic: tbeta J beta == J.
                IMat J(2 * n, 2 * n);
                for (int i = 0; i < n; ++i) {
                    J.at(i, n + i) = 1;
                    J.at(n + i, i) = -1;
                }
                CHECK(beta.transpose() * J * beta == J);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        CHECK(mod_reduce(beta.at(n + i, j), N) == 0);
                        CHECK(mod_reduce(beta.at(i, j) - A.at(i, j), N) == 0);
                        CHECK(mod_reduce(beta.at(i, n + j) - B.at(i, j), N) == 0);
                        CHECK(mod_reduce(beta.at(n + i, n + j) - D.at(i, j), N) == 0);
                    }
            }
        }
    }
}

TEST_CASE("level and character") {
    CHECK(level(two_identity(2)) == 4);
    CHECK(level(two_identity(8)) == 4);
    CHECK(level(a2()) == 3);
    CHECK(level(hplane()) == 1);
    SymIntMat a2cubed = a2().dsum(a2()).dsum(a2());
    CHECK(level(a2cubed) == 3);

    // chi for A2: (-det|.) = (-3|.)
    CHECK(character(a2(), 1) == 1);
    CHECK(character(a2(), 2) == -1);
    CHECK(character(a2(), -1) == -1); // k = 1 odd, sgn enters
    CHECK_THROWS(character(a2(), 3));

    // chi for 2I_8: det 256, k = 4 even -> (256|d) = 1 for odd d.
    CHECK(character(two_identity(8), 3) == 1);
    CHECK(character(two_identity(8), -5) == 1);
}

TEST_CASE("is_hyperbolic_mod4") {
    CHECK(is_hyperbolic_mod4(hplane()));
    CHECK(!is_hyperbolic_mod4(a2()));
    CHECK(is_hyperbolic_mod4(hplane().dsum(hplane())));
    CHECK(is_hyperbolic_mod4(a2().dsum(a2()))); // A+A ~ H+H over Z_2
    CHECK_THROWS(is_hyperbolic_mod4(SymIntMat(1, {2})));
}

static void check_splitting(const SymIntMat& S, const JordanSplitting& js, bool cusp) {
    // Witness validity.
    CHECK(js.G.det() == 1);
    SymIntMat lhs = S.conj(js.G);
    CHECK(lhs.congruent(js.assembled(), js.precision));
    // Block shapes.
    long prev = -1;
    for (const auto& b : js.blocks) {
        CHECK(b.scale > prev);
        prev = b.scale;
        CHECK(b.J.n >= 1);
        Int d = b.J.det();
        CHECK(mod_reduce(d, js.q) != 0); // unit block
        if (js.q != 2) {
            for (int i = 0; i < b.J.n; ++i)
                for (int j = 0; j < b.J.n; ++j) {
                    if (i != j) CHECK(b.J.at(i, j) == 0);
                    else if (i + 1 < b.J.n) CHECK(b.J.at(i, i) == (cusp ? 1 : 2));
                }
        }
    }
    if (!cusp) CHECK(js.zero_size == 0);
}

TEST_CASE("jordan_split: known forms") {
    {
        auto js = jordan_split(a2(), 3, 1);
        CHECK(js.blocks.size() == 2);
        CHECK(js.blocks[0].scale == 0);
        CHECK(js.blocks[0].J.n == 1);
        CHECK(js.blocks[1].scale == 1);
        CHECK(js.blocks[1].J.n == 1);
        check_splitting(a2(), js, false);
    }
    {
        auto js = jordan_split(two_identity(8), 2, 2);
        CHECK(js.blocks.size() == 1);
        CHECK(js.blocks[0].scale == 1);
        CHECK(js.blocks[0].J.n == 8);
        check_splitting(two_identity(8), js, false);
    }
    {
        // H splits off as a scale-0 even block at q = 2.
        auto js = jordan_split(hplane(), 2, 1);
        CHECK(js.blocks.size() == 1);
        CHECK(js.blocks[0].scale == 0);
        CHECK(js.blocks[0].J == hplane());
        check_splitting(hplane(), js, false);
    }
    {
        // A2 at q = 2 is an even unit block with det == 3 mod 8: the A block.
        auto js = jordan_split(a2(), 2, 1);
        CHECK(js.blocks.size() == 1);
        CHECK(js.blocks[0].scale == 0);
        CHECK(js.blocks[0].J.n == 2);
        check_splitting(a2(), js, false);
    }
    {
        // A + A collapses to H + (a-scaled H) over Z_2.
        SymIntMat s = a2().dsum(a2());
        auto js = jordan_split(s, 2, 2);
        CHECK(js.blocks.size() == 1);
        const SymIntMat& J = js.blocks[0].J;
        CHECK(J.n == 4);
        CHECK(J.at(0, 0) == 0);
        CHECK(J.at(1, 1) == 0);
        CHECK(J.at(0, 1) == 1);
        CHECK(J.at(2, 2) == 0);
        CHECK(J.at(3, 3) == 0);
        CHECK(mod_reduce(J.at(2, 3), 2) == 1); // free odd parameter
        check_splitting(s, js, false);
    }
    {
        // Odd diagonal form at q = 2.
        SymIntMat s(2, {1, 0, 0, 7});
        auto js = jordan_split(s, 2, 2);
        CHECK(js.blocks.size() == 1);
        CHECK(js.blocks[0].J.at(0, 0) == 1);
        CHECK(js.blocks[0].J.at(1, 1) == 7);
        check_splitting(s, js, false);
    }
    {
        // Mixed scales at q = 5: diag(2, 50).
        SymIntMat s(2, {2, 0, 0, 50});
        auto js = jordan_split(s, 5, 2);
        CHECK(js.blocks.size() == 2);
        CHECK(js.blocks[0].scale == 0);
        CHECK(js.blocks[1].scale == 2);
        check_splitting(s, js, false);
    }
}

TEST_CASE("jordan_split: scale overflow throws") {
    SymIntMat s(1, {27});
    CHECK_THROWS(jordan_split(s, 3, 2));
    CHECK_NOTHROW(jordan_split(s, 3, 3));
}

TEST_CASE("jordan_split: random forms, odd q") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 1 + trial % 4;
        Int q = std::vector<Int>{3, 5, 7}[trial % 3];
        long e = 1 + trial % 3;
        SymIntMat s = random_sym(rng, n, -40, 40);
        if (mod_reduce(s.det(), q) == 0) continue; // keep scales small
        auto js = jordan_split(s, q, e);
        check_splitting(s, js, false);
    }
}

TEST_CASE("jordan_split: random forms, q = 2") {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 80; ++trial) {
        int n = 1 + trial % 4;
        long e = 1 + trial % 3;
        SymIntMat s = random_sym(rng, n, -40, 40);
        if (mod_reduce(s.det(), 2) == 0) continue;
        auto js = jordan_split(s, 2, e);
        check_splitting(s, js, false);
    }
}

TEST_CASE("jordan_split: random scaled forms") {
    std::mt19937 rng(47);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 1 + trial % 3;
        Int q = std::vector<Int>{2, 3, 5}[trial % 3];
        SymIntMat a = random_sym(rng, n, -10, 10);
        if (mod_reduce(a.det(), q) == 0) continue;
        SymIntMat s = a.dsum(a.scaled(q)); // guaranteed block structure
        long e = 2;
        auto js = jordan_split(s, q, e);
        check_splitting(s, js, false);
        auto sizes = js.sizes();
        CHECK(sizes[0] >= 1);
    }
}

TEST_CASE("jordan_split_cusp: singular matrices") {
    {
        SymIntMat s(2, {1, 0, 0, 0});
        auto js = jordan_split_cusp(s, 3, 2);
        CHECK(js.zero_size == 1);
        CHECK(js.blocks.size() == 1);
        check_splitting(s, js, true);
    }
    {
        SymIntMat z(3);
        auto js = jordan_split_cusp(z, 2, 2);
        CHECK(js.zero_size == 3);
        CHECK(js.blocks.empty());
        CHECK(js.G.det() == 1);
    }
    std::mt19937 rng(53);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 2 + trial % 3;
        Int q = std::vector<Int>{2, 3, 5}[trial % 3];
        long e = 1 + trial % 3;
        Int qe = 1;
        for (long i = 0; i < e; ++i) qe *= q;
        SymIntMat s = random_sym(rng, n, 0, 30);
        // Kill a random row/col mod q^e to force a zero block sometimes.
        if (trial % 2 == 0)
            for (int j = 0; j < n; ++j) s.set(n - 1, j, s.at(n - 1, j) * qe);
        auto js = jordan_split_cusp(s, q, e);
        check_splitting(s, js, true);
        CHECK(js.dim() == n);
    }
}
