#include <doctest.h>

#include "siegel/localforms.hpp"
#include "siegel/theta.hpp"

using namespace siegel;

namespace {

SymIntMat nId(int m, long c) {
    SymIntMat s(m);
    for (int i = 0; i < m; ++i) s.set(i, i, c);
    return s;
}

const SymIntMat A2 = SymIntMat(2, {2, 1, 1, 2});

SymIntMat a2_cubed() { return A2.dsum(A2).dsum(A2); }

bool close(std::complex<double> a, std::complex<double> b, double tol = 1e-9) {
    return std::abs(a - b) <= tol;
}

CMat tau1(std::complex<double> t) {
    CMat m(1, 1);
    m.at(0, 0) = t;
    return m;
}

IMat mat2(long a, long b, long c, long d) {
    IMat m(2, 2);
    m.at(0, 0) = a;
    m.at(0, 1) = b;
    m.at(1, 0) = c;
    m.at(1, 1) = d;
    return m;
}

} // namespace

TEST_CASE("theta_coeffs examples (n = 1)") {
    auto tsA = theta_coeffs(A2, 1, 10);
    CHECK(tsA.coeffs.at({0}) == 1);
    CHECK(tsA.coeffs.at({2}) == 6);  // x^2 + xy + y^2 = 1 has 6 solutions
    CHECK(tsA.coeffs.count({4}) == 0);
    CHECK(tsA.coeffs.at({6}) == 6);
    CHECK(tsA.coeffs.at({8}) == 6);

    auto ts8 = theta_coeffs(nId(8, 2), 1, 8);
    CHECK(ts8.coeffs.at({0}) == 1);
    CHECK(ts8.coeffs.at({2}) == 16);   // r_8(1)
    CHECK(ts8.coeffs.at({4}) == 112);  // r_8(2)
    CHECK(ts8.coeffs.at({6}) == 448);  // r_8(3)
    CHECK(ts8.coeffs.at({8}) == 1136); // r_8(4)

    CHECK_THROWS(theta_coeffs(SymIntMat(1, {-2}), 1, 4)); // not positive definite
}

TEST_CASE("theta_coeffs n = 2 totals agree with the n = 1 histogram") {
    long bound = 8;
    auto one = theta_coeffs(A2, 1, bound);
    auto two = theta_coeffs(A2, 2, bound);
    // sum over Tr T <= bound equals sum_{a + c <= bound} r(a) r(c).
    Int lhs = 0;
    for (auto& [T, cnt] : two.coeffs) lhs += cnt;
    Int rhs = 0;
    for (auto& [a, ra] : one.coeffs)
        for (auto& [c, rc] : one.coeffs)
            if (a[0] + c[0] <= bound) rhs += ra * rc;
    CHECK(lhs == rhs);
    // Every stored T must be symmetric positive semidefinite with even diagonal.
    for (auto& [T, cnt] : two.coeffs) {
        CHECK(T[1] == T[2]);
        CHECK(T[0] % 2 == 0);
        CHECK(T[3] % 2 == 0);
        CHECK(T[0] * T[3] - T[1] * T[2] >= 0);
        CHECK(cnt > 0);
    }
    // Minimal vectors of A2 pair at 60/120/180 degrees, never orthogonally.
    CHECK(two.coeffs.count({2, 0, 0, 2}) == 0);
    CHECK(two.coeffs.at({2, 2, 2, 2}) == 6);  // the six pairs (x, x)
    CHECK(two.coeffs.at({2, 1, 1, 2}) == 12); // 60-degree pairs, two per x
}

TEST_CASE("theta_eval truncation consistency") {
    auto a = theta_coeffs(a2_cubed(), 1, 24);
    auto b = theta_coeffs(a2_cubed(), 1, 36);
    auto t = tau1({0.3, 1.1});
    CHECK(close(theta_eval(a, t), theta_eval(b, t), 1e-10));
    CHECK_THROWS(theta_eval(a, tau1({0.0, -1.0})));
}

TEST_CASE("slash: identity and translation") {
    auto ts = theta_coeffs(A2, 1, 30);
    auto f = [&](const CMat& t) { return theta_eval(ts, t); };
    auto t = tau1({0.2, 0.9});
    CHECK(close(slash(f, IMat::identity(2), 3, t), f(t), 1e-12));
    // tau -> tau + 1.
    auto T = mat2(1, 1, 0, 1);
    CHECK(close(slash(f, T, 3, t), f(tau1({1.2, 0.9})), 1e-12));
}

TEST_CASE("theta modularity on Gamma_0(N), n = 1") {
    // Points chosen on the isometric circle of each gamma so both sides
    // converge with the same truncation.
    struct Case {
        SymIntMat Q;
        long k, N;
    };
    std::vector<Case> cases = {{nId(8, 2), 4, 4}, {a2_cubed(), 3, 3}};
    for (auto& cs : cases) {
        auto ts = theta_coeffs(cs.Q, 1, 60);
        auto f = [&](const CMat& t) { return theta_eval(ts, t); };
        std::vector<IMat> gammas = {mat2(1, 0, cs.N, 1), mat2(-1, 0, cs.N, -1),
                                    mat2(cs.N - 1, -1, cs.N, -1)};
        for (auto& g : gammas) {
            REQUIRE(g.det() == 1);
            long c = g.at(1, 0).get_si(), d = g.at(1, 1).get_si();
            // tau with |c tau + d| = 1 and maximal imaginary part.
            std::complex<double> tau(-double(d) / c, 1.0 / std::abs(double(c)));
            auto lhs = slash(f, g, cs.k, tau1(tau));
            auto rhs = double(character(cs.Q, d)) * f(tau1(tau));
            CHECK(close(lhs, rhs, 1e-7));
        }
    }
}

TEST_CASE("theta cusp limit: 2I8 at N = 4") {
    SymIntMat Q = nId(8, 2);
    CHECK(close(theta_cusp_limit_numeric(Q, SymIntMat(1, {0}), 1, 20.0), 1.0, 1e-6));
    CHECK(close(theta_cusp_limit_numeric(Q, SymIntMat(1, {1}), 1, 20.0), 1.0 / 16,
                1e-6));
    CHECK(close(theta_cusp_limit_numeric(Q, SymIntMat(1, {2}), 1, 20.0), 0.0, 1e-6));
    // Exact (Y = infinity) values.
    CHECK(theta_cusp_limit_exact(Q, SymIntMat(1, {1}), 1).rational() == Rat(1, 16));
    CHECK(theta_cusp_limit_exact(Q, SymIntMat(1, {2}), 1).rational() == Rat(0));
}

TEST_CASE("theta cusp limit matches the exact value: A2^3 at N = 3") {
    SymIntMat Q = a2_cubed();
    for (long mv : {0L, 1L, 2L}) {
        SymIntMat M(1, {mv});
        auto ex = a_total_exact(Q, M, 3).embed();
        CHECK(close(theta_cusp_limit_numeric(Q, M, 1, 20.0), ex, 1e-6));
        // Already converged at a smaller Y.
        CHECK(close(theta_cusp_limit_numeric(Q, M, 1, 8.0), ex, 1e-4));
    }
}

TEST_CASE("theta cusp limit n = 2: 2I8 at N = 4") {
    SymIntMat Q = nId(8, 2);
    for (auto& rep : enumerate_reduced(2, 4)) {
        auto ex = a_total_exact(Q, rep.M, 4).embed();
        CHECK(close(theta_cusp_limit_numeric(Q, rep.M, 2, 20.0), ex, 1e-6));
    }
}
