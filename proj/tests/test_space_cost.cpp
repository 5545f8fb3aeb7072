#include <doctest.h>

#include "weakkam/minplus.hpp"
#include "weakkam/space_cost.hpp"

using namespace weakkam;

namespace {

Matrix two_point() {
    Matrix m(2, 2);
    m << 0, 2, 2, 1;
    return m;
}

}  // namespace

TEST_CASE("dense kernel construction and validation") {
    CHECK_NOTHROW(build_dense_cost(2, two_point()));
    Matrix single(1, 1);
    single << -7.25;
    CHECK_NOTHROW(build_dense_cost(1, single));

    Matrix bad(2, 2);
    bad << kInf, kInf, 0, 0;
    CHECK_THROWS_AS(build_dense_cost(2, bad), DomainError);
    Matrix badcol(2, 2);
    badcol << kInf, 0, kInf, 0;
    CHECK_THROWS_AS(build_dense_cost(2, badcol), DomainError);
    Matrix nan(2, 2);
    nan << 0, std::nan(""), 1, 0;
    CHECK_THROWS_AS(build_dense_cost(2, nan), DomainError);
    CHECK_THROWS_AS(build_dense_cost(3, two_point()), DomainError);
}

TEST_CASE("circle cost on the grid") {
    auto sqdist = [](double x, double y) {
        double d = lift_min_modulus(y - x);
        return d * d;
    };
    CostKernel k = build_circle_cost(4, sqdist);
    CHECK(k(0, 1) == doctest::Approx(1.0 / 16).epsilon(1e-15));
    CHECK(k(0, 2) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(k(3, 0) == doctest::Approx(1.0 / 16).epsilon(1e-15));

    CostKernel kc = build_circle_cost(8, [](double, double) { return 3.5; });
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) CHECK(kc(i, j) == 3.5);

    SUBCASE("dense and callable storage agree exactly") {
        REQUIRE(k.has_callable());
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) CHECK(k(i, j) == k.callable(i, j));
    }

    SUBCASE("window restricts and flags boundary minimizers") {
        CostKernel kw = build_circle_cost(8, sqdist, 2);
        CHECK(kw(0, 4) == kInf);
        CHECK(std::isfinite(kw(0, 1)));
        auto drift = [](double x, double y) {
            double d = lift_min_modulus(y - x);
            return (d - 0.25) * (d - 0.25);
        };
        CHECK_THROWS_AS(build_circle_cost(8, drift, 1), NumericalError);
        CHECK_NOTHROW(build_circle_cost(8, drift, 3));
    }
}

TEST_CASE("free action kernel is the squared displacement") {
    ActionDiscretization a;
    a.grid_n = 4;
    a.steps_m = 1;
    a.potential = [](double) { return 0.0; };
    a.cohomology_c = 0.0;
    CostKernel k = build_action_cost(a);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double d = lift_min_modulus((j - i) / 4.0);
            CHECK(k(i, j) == doctest::Approx(0.5 * d * d).epsilon(1e-15));
            CHECK(k.displacement()(i, j) == doctest::Approx(d));
        }
}

TEST_CASE("action kernel with drift has critical value c^2/2") {
    ActionDiscretization a;
    a.grid_n = 20;
    a.steps_m = 2;
    a.potential = [](double) { return 0.0; };
    a.cohomology_c = 0.3;
    CostKernel k = build_action_cost(a);
    double c0 = critical_value_karp(k).value;
    CHECK(c0 == doctest::Approx(0.5 * 0.3 * 0.3).epsilon(0.02));
    // u = 0 certifies the value: its Bellman slack equals the best drift cost
    Vector u = Vector::Zero(20);
    Vector tu = apply_T_minus(k, u);
    CHECK((-tu.minCoeff()) == doctest::Approx(c0).epsilon(0.02));
}

TEST_CASE("multi-step action kernels compose") {
    ActionDiscretization a;
    a.grid_n = 12;
    a.steps_m = 4;
    a.potential = [](double x) { return -std::sin(M_PI * x) * std::sin(M_PI * x); };
    a.cohomology_c = 0.1;
    CostKernel whole = build_action_cost(a);

    // raw quarter-step kernel, composed by hand in two different groupings
    const int n = a.grid_n;
    const double tau = 0.25;
    FiniteSpace space = make_circle_grid(n);
    Matrix m(n, n), disp(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double d = lift_min_modulus(space.coords[j] - space.coords[i]);
            double mid = space.coords[i] + 0.5 * d;
            mid -= std::floor(mid);
            m(i, j) = tau * (0.5 * (d / tau) * (d / tau) - a.potential(mid)) - a.cohomology_c * d;
            disp(i, j) = d;
        }
    CostKernel c1 = CostKernel(space, m, true).with_displacement(disp);
    CostKernel c2 = minplus_compose(c1, c1);
    CostKernel c3 = minplus_compose(c2, c1);
    CostKernel left = minplus_compose(c3, c1);
    CostKernel split = minplus_compose(c2, c2);
    double scale = 1.0 + whole.norm_inf();
    CHECK((left.entries() - whole.entries()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((split.entries() - whole.entries()).cwiseAbs().maxCoeff() <= 1e-13 * scale);
    // composed displacements track the minimizing sub-chains
    CHECK((left.displacement() - whole.displacement()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("action budget guard") {
    ActionDiscretization a;
    a.grid_n = 1000;
    a.steps_m = 1000;
    a.potential = [](double) { return 0.0; };
    CHECK_THROWS_AS(build_action_cost(a, 1000), DomainError);
}

TEST_CASE("finite space validation") {
    CHECK_THROWS_AS(make_space(0), DomainError);
    FiniteSpace s;
    s.n = 2;
    s.coords = {0.5, 0.25};
    CHECK_THROWS_AS(s.validate(), DomainError);
    s.coords = {0.25, 1.5};
    CHECK_THROWS_AS(s.validate(), DomainError);
    CHECK(make_circle_grid(4).coords[3] == doctest::Approx(0.75));
}
