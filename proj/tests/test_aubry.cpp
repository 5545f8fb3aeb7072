#include <doctest.h>

#include "weakkam/aubry.hpp"

#include <random>
#include <set>

using namespace weakkam;

namespace {

CostKernel two_point() {
    Matrix m(2, 2);
    m << 0, 2, 2, 1;
    return build_dense_cost(2, m);
}

CostKernel random_kernel(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = d(rng);
    return build_dense_cost(n, m);
}

}  // namespace

TEST_CASE("Peierls barrier on the fixtures") {
    CostKernel k = two_point();
    BarrierData b = peierls_barrier(k, 0.0);
    Matrix expect(2, 2);
    expect << 0, 2, 2, 4;
    CHECK((b.h - expect).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(b.period == 1);
    CHECK(b.tail_start == 4);
    CHECK_FALSE(b.fallback);

    CostKernel kc = build_dense_cost(3, Matrix::Constant(3, 3, 0.7));
    BarrierData bc = peierls_barrier(kc, -0.7);
    CHECK(bc.h.cwiseAbs().maxCoeff() <= 1e-12);

    Matrix single(1, 1);
    single << 3.0;
    BarrierData bs = peierls_barrier(build_dense_cost(1, single), -3.0);
    CHECK(bs.h(0, 0) == 0.0);
}

TEST_CASE("barrier diverges under a wrong critical constant") {
    CHECK_THROWS_AS(peierls_barrier(two_point(), 0.5), NumericalError);
    CHECK_THROWS_AS(peierls_barrier(two_point(), -0.5), NumericalError);
}

TEST_CASE("barrier row matches the full barrier") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 8; ++trial) {
        int n = 3 + static_cast<int>(rng() % 6);
        CostKernel k = random_kernel(n, rng);
        double c0 = critical_value_karp(k).value;
        BarrierData b = peierls_barrier(k, c0);
        for (int x = 0; x < n; ++x) {
            Vector row = peierls_row(k, c0, x);
            CHECK((row - b.h.row(x).transpose()).cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
}

TEST_CASE("barrier inequalities hold") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 6; ++trial) {
        int n = 3 + static_cast<int>(rng() % 4);
        CostKernel k = random_kernel(n, rng);
        double c0 = critical_value_karp(k).value;
        BarrierData b = peierls_barrier(k, c0);
        double eps = 100.0 * b.eps;
        for (int x = 0; x < n; ++x) CHECK(b.h(x, x) >= -eps);
        auto powers = minplus_power(k, 6);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z) {
                    CHECK(b.h(x, y) <= b.h(x, z) + b.h(z, y) + eps);
                    for (int m = 1; m <= 6; ++m) {
                        CHECK(b.h(x, y) <= b.h(x, z) + powers[m - 1](z, y) + m * c0 + eps);
                        CHECK(b.h(x, y) <= powers[m - 1](x, z) + m * c0 + b.h(z, y) + eps);
                    }
                }
    }
}

TEST_CASE("Aubry sets from the barrier characterizations") {
    CostKernel k = two_point();
    BarrierData b = peierls_barrier(k, 0.0);
    AubryData a = aubry_sets(k, b);
    CHECK(a.projected == std::vector<int>{0});
    REQUIRE(a.pairs.size() == 1);
    CHECK(a.pairs[0] == std::pair<int, int>{0, 0});

    CostKernel kc = build_dense_cost(3, Matrix::Constant(3, 3, -0.2));
    BarrierData bc = peierls_barrier(kc, 0.2);
    AubryData ac = aubry_sets(kc, bc);
    CHECK(ac.projected.size() == 3);
    CHECK(ac.pairs.size() == 9);

    SUBCASE("projections of the pair set agree with the projected set") {
        std::mt19937 rng(7);
        for (int trial = 0; trial < 6; ++trial) {
            CostKernel kr = random_kernel(4 + static_cast<int>(rng() % 4), rng);
            double c0 = critical_value_karp(kr).value;
            BarrierData br = peierls_barrier(kr, c0);
            AubryData ar = aubry_sets(kr, br);
            std::set<int> p1, p2, pa(ar.projected.begin(), ar.projected.end());
            for (auto& [x, y] : ar.pairs) {
                p1.insert(x);
                p2.insert(y);
            }
            CHECK(p1 == pa);
            CHECK(p2 == pa);
        }
    }

    SUBCASE("unreachable tolerance reports an empty set") {
        std::mt19937 rng(9);
        CostKernel kr = random_kernel(5, rng);
        double c0 = critical_value_karp(kr).value + 1e-13;
        BarrierData br = peierls_barrier(kr, c0);
        CHECK_THROWS_AS(aubry_sets(kr, br, 1e-300), NumericalError);
    }
}

TEST_CASE("subsolution check") {
    CostKernel kc = build_dense_cost(3, Matrix::Constant(3, 3, 1.4));
    CHECK(is_subsolution(kc, Vector::Zero(3), -1.4).ok);
    CHECK(is_subsolution(kc, Vector::Zero(3), -1.4).max_violation == 0.0);

    CostKernel k = two_point();
    Vector u(2);
    u << 0, 2;
    CHECK(is_subsolution(k, u, 0.0).ok);
    Vector bad(2);
    bad << 0, 5;
    SubsolutionCheck sc = is_subsolution(k, bad, 0.0);
    CHECK_FALSE(sc.ok);
    CHECK(sc.max_violation == doctest::Approx(3.0));
    CHECK(sc.worst_x == 0);
    CHECK(sc.worst_y == 1);
}

TEST_CASE("weak KAM solutions from barrier rows") {
    CostKernel k = two_point();
    BarrierData b = peierls_barrier(k, 0.0);
    double res = 0.0;
    Vector u = weak_kam_from_barrier(k, b, 0, false, &res);
    CHECK(u(0) == 0.0);
    CHECK(u(1) == 2.0);
    CHECK(res <= 1e-12);

    Vector v = weak_kam_from_barrier(k, b, 0, true, &res);
    CHECK(v(0) == 0.0);
    CHECK(v(1) == -2.0);
    CHECK(res <= 1e-12);

    CostKernel kc = build_dense_cost(4, Matrix::Constant(4, 4, 0.9));
    BarrierData bc = peierls_barrier(kc, -0.9);
    CHECK(weak_kam_from_barrier(kc, bc, 2).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("extension of Aubry data to weak KAM solutions") {
    CostKernel k = two_point();
    BarrierData b = peierls_barrier(k, 0.0);
    AubryData a = aubry_sets(k, b);
    Vector u = extend_from_aubry(b, a, {0.0});
    CHECK(u(0) == 0.0);
    CHECK(u(1) == 2.0);
    Vector us = extend_from_aubry(b, a, {1.5});
    CHECK(((us.array() - 1.5).matrix() - u).cwiseAbs().maxCoeff() == 0.0);

    CostKernel kc = build_dense_cost(3, Matrix::Constant(3, 3, -0.2));
    BarrierData bc = peierls_barrier(kc, 0.2);
    AubryData ac = aubry_sets(kc, bc);
    CHECK_THROWS_AS(extend_from_aubry(bc, ac, {0.0, 1.0, 0.0}), DomainError);
    Vector uc = extend_from_aubry(bc, ac, {0.25, 0.25, 0.25});
    CHECK((uc.array() - 0.25).abs().maxCoeff() <= 1e-12);

    SUBCASE("the Aubry set determines the solution") {
        std::mt19937 rng(11);
        for (int trial = 0; trial < 6; ++trial) {
            int n = 4 + static_cast<int>(rng() % 4);
            CostKernel kr = random_kernel(n, rng);
            double c0 = critical_value_karp(kr).value;
            BarrierData br = peierls_barrier(kr, c0);
            AubryData ar = aubry_sets(kr, br);
            Vector w = weak_kam_from_barrier(kr, br, ar.projected.front());
            std::vector<double> f;
            for (int x : ar.projected) f.push_back(w(x));
            Vector w2 = extend_from_aubry(br, ar, f);
            CHECK((w - w2).cwiseAbs().maxCoeff() <= 3.0 * ar.tolerance);
        }
    }
}

TEST_CASE("conjugate pairs of subsolutions") {
    CostKernel k = two_point();

    Vector u(2);
    u << 0, 2;
    auto [um, up] = conjugate_pair(k, u, 0.0);
    CHECK(um(0) == 0.0);
    CHECK(um(1) == 2.0);
    CHECK(up(0) == 0.0);
    CHECK(up(1) == -2.0);

    Vector w(2);
    w << 0, 1;
    auto [wm, wp] = conjugate_pair(k, w, 0.0);
    CHECK(wm(0) == 0.0);
    CHECK(wm(1) == 2.0);
    CHECK(wp(0) == 0.0);
    CHECK(wp(1) == -2.0);
    // the pair brackets the subsolution and agrees with it on the Aubry set
    CHECK((wm - w).minCoeff() >= 0.0);
    CHECK((w - wp).minCoeff() >= 0.0);
    CHECK(wm(0) == wp(0));

    CostKernel kc = build_dense_cost(3, Matrix::Constant(3, 3, 0.7));
    auto [cm, cp] = conjugate_pair(kc, Vector::Zero(3), -0.7);
    CHECK(cm.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(cp.cwiseAbs().maxCoeff() <= 1e-12);

    Vector notsub(2);
    notsub << 0, 5;
    CHECK_THROWS_AS(conjugate_pair(k, notsub, 0.0), DomainError);
}

TEST_CASE("subsolutions are dominated by the barrier") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 6; ++trial) {
        int n = 3 + static_cast<int>(rng() % 5);
        CostKernel k = random_kernel(n, rng);
        double c0 = critical_value_karp(k).value;
        BarrierData b = peierls_barrier(k, c0);
        Vector u = weak_kam_from_barrier(k, b, 0);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) CHECK(u(y) - u(x) <= b.h(x, y) + 100.0 * b.eps);
    }
}

TEST_CASE("strengthened barrier bound along both semigroups") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 4; ++trial) {
        int n = 3 + static_cast<int>(rng() % 3);
        CostKernel k = random_kernel(n, rng);
        double c0 = critical_value_karp(k).value;
        BarrierData b = peierls_barrier(k, c0);
        Vector u = weak_kam_from_barrier(k, b, 0);
        std::vector<Vector> tm{u}, tp{u};
        for (int m = 1; m <= 20; ++m) {
            tm.push_back(apply_T_minus(k, tm.back()));
            tp.push_back(apply_T_plus(k, tp.back()));
        }
        for (int nn = 0; nn <= 20; nn += 5)
            for (int mm = 0; mm <= 20; mm += 5)
                for (int x = 0; x < n; ++x)
                    for (int y = 0; y < n; ++y)
                        CHECK(tm[nn](y) - tp[mm](x) + (nn + mm) * c0 <=
                              b.h(x, y) + 100.0 * b.eps);
    }
}

TEST_CASE("infimum of weak KAM solutions is a weak KAM solution") {
    std::mt19937 rng(19);
    for (int trial = 0; trial < 6; ++trial) {
        int n = 4 + static_cast<int>(rng() % 4);
        CostKernel k = random_kernel(n, rng);
        double c0 = critical_value_karp(k).value;
        BarrierData b = peierls_barrier(k, c0);
        Vector m = b.h.row(0).transpose();
        for (int x = 1; x < n; ++x)
            m = m.cwiseMin(b.h.row(x).transpose() + Vector::Constant(n, 0.3 * x));
        double res = (m - (apply_T_minus(k, m).array() + c0).matrix()).cwiseAbs().maxCoeff();
        CHECK(res <= 100.0 * b.eps);
    }
}

TEST_CASE("symmetrized barrier mean is a strict subsolution outside the pair set") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 6; ++trial) {
        int n = 2 + static_cast<int>(rng() % 5);
        CostKernel k = trial == 0 ? two_point() : random_kernel(n, rng);
        double c0 = critical_value_karp(k).value;
        BarrierData b = peierls_barrier(k, c0);
        AubryData a = aubry_sets(k, b);
        Vector u = strict_subsolution(k, b, a);
        CHECK(is_subsolution(k, u, c0, 100.0 * b.eps).ok);
        std::set<std::pair<int, int>> pairs(a.pairs.begin(), a.pairs.end());
        for (int x = 0; x < k.size(); ++x)
            for (int y = 0; y < k.size(); ++y) {
                if (pairs.count({x, y})) continue;
                CHECK(u(y) - u(x) < k(x, y) + c0 - 1e-9);
            }
    }
}
