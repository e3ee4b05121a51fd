#include <doctest.h>

#include "siegel/symplectic.hpp"

#include <random>

using namespace siegel;

TEST_CASE("is_symplectic and in_gamma0") {
    CHECK(is_symplectic(IMat::identity(4)));
    SymIntMat M(2, {1, 2, 2, 5});
    IMat g = gamma_of(M);
    CHECK(is_symplectic(g));
    IMat bad = IMat::identity(4);
    bad.at(2, 0) = 1; // C not symmetric against D = I? C = e11-like
    bad.at(3, 1) = 2;
    CHECK(is_symplectic(bad)); // C diagonal, still symplectic
    bad.at(2, 1) = 1;          // now C tD not symmetric
    CHECK(!is_symplectic(bad));

    CHECK(in_gamma0(gamma_of(SymIntMat(1, {4})), 4));
    CHECK(!in_gamma0(gamma_of(SymIntMat(1, {1})), 4));
    IMat up = IMat::identity(4);
    up.at(0, 2) = 3;
    up.at(2, 0) = 0;
    CHECK(in_gamma0(up, 12));
}

TEST_CASE("oracle group orders") {
    CHECK(SpOracle(1, 2).group_order() == 6);
    CHECK(SpOracle(1, 4).group_order() == 48);
    CHECK(SpOracle(1, 9).group_order() == 648);
    CHECK(SpOracle(2, 2).group_order() == 720);
    CHECK(SpOracle(2, 3).group_order() == 51840);
}

TEST_CASE("oracle elements are symplectic mod N") {
    SpOracle o(2, 3);
    std::mt19937 rng(3);
    std::uniform_int_distribution<size_t> d(0, o.group_order() - 1);
    Int N = 3;
    for (int t = 0; t < 200; ++t) {
        IMat g = o.element(d(rng));
        // check block relations mod N
        int n = 2;
        auto blk = [&](int bi, int bj) {
            IMat b(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) b.at(i, j) = g.at(bi * n + i, bj * n + j);
            return b;
        };
        IMat A = blk(0, 0), B = blk(0, 1), C = blk(1, 0), D = blk(1, 1);
        CHECK((A * B.transpose()).congruent((A * B.transpose()).transpose(), N));
        CHECK((C * D.transpose()).congruent((C * D.transpose()).transpose(), N));
        CHECK((A * D.transpose() - B * C.transpose()).congruent(IMat::identity(n), N));
    }
}

TEST_CASE("double coset counts") {
    CHECK(SpOracle(1, 2).double_coset_count() == 2);
    CHECK(SpOracle(1, 4).double_coset_count() == 3);
    CHECK(SpOracle(1, 9).double_coset_count() == 4);
}

TEST_CASE("double coset equivalence examples") {
    SpOracle o(1, 4);
    SymIntMat m1(1, {1}), m2(1, {3}), m3(1, {2});
    CHECK(o.equivalent(m1, m1));
    CHECK(o.equivalent(m1, m2));
    CHECK(!o.equivalent(m1, m3));
    CHECK(!o.equivalent(m3, SymIntMat(1, {0})));
}

TEST_CASE("double coset invariance under parabolic multiplication") {
    // Left Gamma_inf / right Gamma_0 multiplications preserve the coset id.
    SpOracle o(1, 6);
    std::mt19937 rng(9);
    std::uniform_int_distribution<size_t> d(0, o.group_order() - 1);
    for (int t = 0; t < 50; ++t) {
        IMat x = o.element(d(rng));
        int c = o.coset_of(x);
        IMat tb = IMat::identity(2);
        tb.at(0, 1) = long(t % 6);
        CHECK(o.coset_of((tb * x).reduced(6)) == c);
        CHECK(o.coset_of((x * tb).reduced(6)) == c);
        IMat neg = IMat::identity(2);
        neg.at(0, 0) = -1;
        neg.at(1, 1) = -1;
        CHECK(o.coset_of((neg * x).reduced(6)) == c);
        // Right multiplication by a unit torus (in Gamma_0-bar, not Gamma_inf-bar).
        IMat tor(2, 2);
        tor.at(0, 0) = 5;
        tor.at(1, 1) = 5; // 5*5 = 25 == 1 mod 6
        CHECK(o.coset_of((x * tor).reduced(6)) == c);
    }
}

TEST_CASE("oracle scale guard") {
    CHECK_THROWS_WITH(SpOracle(1, 70), doctest::Contains("oracle scale exceeded"));
    CHECK_THROWS_WITH(SpOracle(2, 7), doctest::Contains("oracle scale exceeded"));
}

TEST_CASE("orbit reps cover all cosets") {
    SpOracle o(1, 4);
    auto reps = o.orbit_reps();
    CHECK(int(reps.size()) == o.double_coset_count());
    std::vector<bool> seen(reps.size(), false);
    for (auto& r : reps) {
        int c = o.coset_of(r);
        CHECK(!seen[c]);
        seen[c] = true;
    }
}
