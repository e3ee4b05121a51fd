#include <doctest.h>

#include "siegel/gauss.hpp"

#include <random>

using namespace siegel;

namespace {

SymIntMat diag(std::vector<long> v) {
    SymIntMat s(int(v.size()));
    for (size_t i = 0; i < v.size(); ++i) s.set(int(i), int(i), v[i]);
    return s;
}

const SymIntMat H = SymIntMat(2, {0, 1, 1, 0});
const SymIntMat A = SymIntMat(2, {2, 1, 1, 2});

SymIntMat nId(int m, long c) {
    SymIntMat s(m);
    for (int i = 0; i < m; ++i) s.set(i, i, c);
    return s;
}

bool close(std::complex<double> a, std::complex<double> b, double tol = 1e-9) {
    return std::abs(a - b) <= tol;
}

// J shapes from the normal-form classes.
std::vector<SymIntMat> j_shapes(long q) {
    if (q == 2)
        return {diag({1}), diag({3}), diag({5}), diag({7}), diag({1, 3}),
                diag({3, 5}), diag({1, 1, 7}), diag({1, 3, 5, 7}), H, A,
                H.dsum(H), H.dsum(A)};
    long w = least_nonresidue(q).get_si();
    return {diag({2}), diag({2 * w}), diag({2, 2}), diag({2, 2 * w}),
            diag({2, 2, 2}), diag({2, 2, 2 * w})};
}

std::vector<SymIntMat> m_shapes(long q) {
    if (q == 2)
        return {diag({1}), diag({3}), diag({1, 5}), diag({3, 7}), H, A,
                diag({1, 3, 5})};
    long w = least_nonresidue(q).get_si();
    return {diag({1}), diag({w}), diag({1, 1}), diag({1, w}), diag({1, 1, w})};
}

} // namespace

TEST_CASE("AlgebraicValue arithmetic") {
    auto i = AlgebraicValue::i();
    CHECK(i * i == AlgebraicValue(Rat(-1)));
    auto z = AlgebraicValue::zeta8();
    CHECK(z * z == i);
    CHECK(z.pow(8) == AlgebraicValue(1));
    CHECK(AlgebraicValue::half_power(2, 2) == AlgebraicValue(2));
    CHECK(AlgebraicValue::half_power(3, -2) == AlgebraicValue(Rat(1, 3)));
    auto s2 = AlgebraicValue::half_power(2, 1);
    CHECK(close(s2.embed(), std::sqrt(2.0)));
    CHECK(close((s2 * z).embed(), {1.0, 1.0})); // sqrt2 zeta8 = 1 + i
    auto j = to_json(s2 * z);
    CHECK(j["one_plus_i"] == true);
    CHECK(j["i_power"] == 0);
}

TEST_CASE("CycloSum canonical reduction and equality") {
    CycloSum s(3);
    s.add(0);
    s.add(1);
    s.add(2);
    for (auto& v : s.canonical()) CHECK(v == 0); // 1 + zeta3 + zeta3^2 = 0
    CycloSum a(2), b(4);
    a.add(1);
    b.add(2);
    CHECK(cyclo_equal(a, b)); // -1 at both orders
    CycloSum c(4);
    c.add(1);
    CHECK(!cyclo_equal(a, c));
    CHECK(close(c.embed(), {0.0, 1.0}));
}

TEST_CASE("gauss_sum_brute examples") {
    CHECK(close(gauss_sum_brute(diag({1}), diag({1}), 2, 1).value, {1.0, 1.0}));
    CHECK(close(gauss_sum_brute(H, diag({1}), 2, 1).value, {2.0, 0.0}));
    CHECK(close(gauss_sum_brute(diag({2}), diag({1}), 3, 1).value,
                {0.0, std::sqrt(3.0)}));
    CHECK_THROWS(gauss_sum_brute(diag({1}), diag({1}), 3, 1)); // J not even
    CHECK_THROWS(gauss_sum_brute(diag({2}), diag({3}), 3, 1)); // M singular mod 3
}

TEST_CASE("classical_gauss matches brute") {
    for (long q : {3L, 5L, 7L}) {
        for (long a = 1; a < q; ++a) {
            auto v = classical_gauss(a, q);
            auto b = gauss_sum_brute(diag({2 * a}), diag({1}), q, 1);
            CHECK(close(v.embed(), b.value));
        }
    }
    CHECK(classical_gauss(1, 5) == AlgebraicValue::half_power(5, 1));
    CHECK(classical_gauss(1, 3) ==
          AlgebraicValue::i() * AlgebraicValue::half_power(3, 1));
}

TEST_CASE("closed dyadic examples") {
    CHECK(close(gauss_sum_closed_dyadic(A, diag({1})).embed(), {-2.0, 0.0}));
    CHECK(close(gauss_sum_closed_dyadic(diag({1}), diag({3})).embed(), {1.0, -1.0}));
    CHECK(close(gauss_sum_closed_dyadic(H, H).embed(), {4.0, 0.0}));
    CHECK(close(gauss_sum_closed_dyadic(H.dsum(H), diag({3, 7})).embed(), {16.0, 0.0}));
}

TEST_CASE("closed forms match brute on the shape grid") {
    for (long q : {2L, 3L, 5L, 7L}) {
        for (auto& J : j_shapes(q))
            for (auto& M : m_shapes(q))
                for (long h : {1L, 2L, 3L}) {
                    double logterms = double(h) * J.n * M.n * std::log2(double(q));
                    if (logterms > 20.0) continue; // keep unit tests fast
                    auto brute = gauss_sum_brute(J, M, q, h);
                    auto closed = gauss_sum_reduce(J, M, q, h);
                    CAPTURE(q);
                    CAPTURE(h);
                    CHECK(close(brute.value, closed.embed()));
                    // |G(q)| = q^{rd/2}.
                    CHECK(std::abs(std::abs(closed.embed()) -
                                   std::pow(double(q), 0.5 * h * J.n * M.n)) < 1e-6);
                }
    }
}

TEST_CASE("modulus reduction identity is exact") {
    for (long q : {2L, 3L, 5L}) {
        for (auto& J : j_shapes(q))
            for (auto& M : m_shapes(q)) {
                long rd = long(J.n) * M.n;
                if (3.0 * rd * std::log2(double(q)) > 20.0) continue;
                auto g3 = gauss_sum_brute(J, M, q, 3);
                auto g1 = gauss_sum_brute(J, M, q, 1);
                Int scale;
                mpz_ui_pow_ui(scale.get_mpz_t(), unsigned(q), unsigned(rd));
                CHECK(cyclo_equal(g3.sum, g1.sum.scaled(scale)));
                auto g2 = gauss_sum_brute(J, M, q, 2);
                auto odd_diag = [](const SymIntMat& S) {
                    for (int i = 0; i < S.n; ++i)
                        if (S.at(i, i) % 2 != 0) return true;
                    return false;
                };
                // G(q^2) = q^{rd} holds except at q = 2 with both forms odd
                // diagonal, where a zeta8 factor survives (see closed form).
                if (!(q == 2 && odd_diag(J) && odd_diag(M)))
                    CHECK(cyclo_equal(g2.sum, CycloSum::constant(2, scale)));
                CHECK(close(g2.value, gauss_sum_reduce(J, M, q, 2).embed()));
            }
    }
}

TEST_CASE("symmetry and basis invariance (brute)") {
    std::mt19937 rng(7);
    auto J = diag({1, 3});
    auto M = diag({5, 7});
    CHECK(cyclo_equal(gauss_sum_brute(J, M, 2, 2).sum,
                      gauss_sum_brute(M, J, 2, 2).sum));
    // Conjugate J by a det-1 E.
    IMat E = IMat::identity(2);
    E.at(0, 1) = 2;
    auto Jc = SymIntMat::from_imat(E.transpose() * J.as_imat() * E);
    CHECK(cyclo_equal(gauss_sum_brute(Jc, M, 2, 2).sum,
                      gauss_sum_brute(J, M, 2, 2).sum));
    // Unit-rescale invariance of the closed forms.
    for (long q : {2L, 5L}) {
        auto Jq = (q == 2) ? diag({1, 3}) : diag({2, 4});
        long u = (q == 2) ? 3 : 2;
        IMat U = IMat::identity(2);
        U.at(1, 1) = u;
        auto Ju = SymIntMat::from_imat(U.transpose() * Jq.as_imat() * U);
        auto Mq = diag({1});
        auto v1 = gauss_sum_reduce(Jq, Mq, q, 1);
        auto v2 = gauss_sum_reduce(Ju, Mq, q, 1);
        CHECK(v1 == v2);
    }
}

TEST_CASE("a_q exact oracle: Q = 2I8, N = 4") {
    SymIntMat Q = nId(8, 2);
    auto c0 = a_q_exact(Q, SymIntMat(1, {0}), 2, 2, 4);
    auto c1 = a_q_exact(Q, SymIntMat(1, {1}), 2, 2, 4);
    auto c2 = a_q_exact(Q, SymIntMat(1, {2}), 2, 2, 4);
    REQUIRE(c0.is_rational());
    REQUIRE(c1.is_rational());
    REQUIRE(c2.is_rational());
    CHECK(c0.rational() == Rat(1));
    CHECK(c1.rational() == Rat(1, 16));
    CHECK(c2.rational() == Rat(0));
    // Global sum agrees (single prime).
    CHECK(a_total_exact(Q, SymIntMat(1, {1}), 4).rational() == Rat(1, 16));
}

TEST_CASE("a_q formula path: Q = 2I8, N = 4") {
    SymIntMat Q = nId(8, 2);
    auto SQ = jordan_split(Q, 2, 2);
    auto r1 = reduce_cusp(SymIntMat(1, {1}), 1, 4);
    auto v1 = a_q_formula(SQ, r1.rep.profile[0]);
    CHECK(v1 == AlgebraicValue(Rat(1, 16)));
    auto r0 = reduce_cusp(SymIntMat(1, {0}), 1, 4);
    CHECK(a_q_formula(SQ, r0.rep.profile[0]) == AlgebraicValue(1));
    // Known formula/exact discrepancy at M = [2]: formula gives the empty
    // product 1, the exact sum vanishes.
    auto r2 = reduce_cusp(SymIntMat(1, {2}), 1, 4);
    CHECK(a_q_formula(SQ, r2.rep.profile[0]) == AlgebraicValue(1));
    CHECK(a_total_formula(Q, r1.rep) == AlgebraicValue(Rat(1, 16)));
}

TEST_CASE("a_total: A2+A2+A2 at N = 3") {
    SymIntMat A2 = SymIntMat(2, {2, 1, 1, 2});
    SymIntMat Q = A2.dsum(A2).dsum(A2);
    CHECK(level(Q) == 3);
    for (long mval : {0L, 1L, 2L}) {
        SymIntMat M(1, {mval});
        auto ex = a_total_exact(Q, M, 3);
        auto exq = a_q_exact(Q, M, 3, 1, 3);
        CHECK(close(ex.embed(), exq.embed(), 1e-9));
        if (mval == 0) CHECK(ex.rational() == Rat(1));
    }
    // Formula path agrees with exact on the reduced representatives.
    for (auto& rep : enumerate_reduced(1, 3)) {
        auto f = a_total_formula(Q, rep);
        auto ex = a_total_exact(Q, rep.M, 3);
        CHECK(close(f.embed(), ex.embed(), 1e-9));
    }
    CHECK(kappa(3) == Rat(1));
    CHECK(kappa(2) == Rat(1, 2));
}
