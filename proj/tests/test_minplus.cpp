#include <doctest.h>

#include "weakkam/minplus.hpp"

#include <random>

using namespace weakkam;

namespace {

CostKernel two_point() {
    Matrix m(2, 2);
    m << 0, 2, 2, 1;
    return build_dense_cost(2, m);
}

CostKernel constant_kernel(int n, double k) {
    return build_dense_cost(n, Matrix::Constant(n, n, k));
}

CostKernel random_kernel(int n, std::mt19937& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = d(rng);
    return build_dense_cost(n, m);
}

Vector random_vector(int n, std::mt19937& rng, double amp = 1.0) {
    std::uniform_real_distribution<double> d(-amp, amp);
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = d(rng);
    return v;
}

// independent oracle: n-step minimal path cost by exhaustive enumeration
double brute_cn(const Matrix& c, int n, int x, int y) {
    if (n == 1) return c(x, y);
    double best = kInf;
    for (int z = 0; z < c.rows(); ++z) best = std::min(best, brute_cn(c, n - 1, x, z) + c(z, y));
    return best;
}

// independent oracle: minimum cycle mean by DFS over simple cycles
void cycle_dfs(const Matrix& c, std::vector<int>& path, std::vector<bool>& used, double acc,
               double& best) {
    int last = path.back();
    for (int z = 0; z < c.rows(); ++z) {
        if (!std::isfinite(c(last, z))) continue;
        if (z == path.front()) {
            double mean = (acc + c(last, z)) / static_cast<double>(path.size());
            best = std::min(best, mean);
        } else if (!used[z] && z > path.front()) {
            used[z] = true;
            path.push_back(z);
            cycle_dfs(c, path, used, acc + c(last, z), best);
            path.pop_back();
            used[z] = false;
        }
    }
}

double brute_min_cycle_mean(const Matrix& c) {
    const int n = static_cast<int>(c.rows());
    double best = kInf;
    for (int s = 0; s < n; ++s) {
        std::vector<bool> used(n, false);
        used[s] = true;
        std::vector<int> path{s};
        cycle_dfs(c, path, used, 0.0, best);
    }
    return best;
}

}  // namespace

TEST_CASE("Lax-Oleinik step on the two-point fixture") {
    CostKernel k = two_point();
    Vector f = Vector::Zero(2);
    std::vector<int> arg;
    Vector tm = apply_T_minus(k, f, &arg);
    CHECK(tm(0) == 0.0);
    CHECK(tm(1) == 1.0);
    CHECK(arg[0] == 0);
    CHECK(arg[1] == 1);
    Vector tp = apply_T_plus(k, f);
    CHECK(tp(0) == 0.0);
    CHECK(tp(1) == -1.0);
}

TEST_CASE("constant kernels collapse to extrema") {
    std::mt19937 rng(7);
    CostKernel k = constant_kernel(5, 2.25);
    Vector f = random_vector(5, rng);
    Vector tm = apply_T_minus(k, f);
    Vector tp = apply_T_plus(k, f);
    for (int i = 0; i < 5; ++i) {
        CHECK(tm(i) == doctest::Approx(f.minCoeff() + 2.25));
        CHECK(tp(i) == doctest::Approx(f.maxCoeff() - 2.25));
    }
}

TEST_CASE("semigroup laws hold on random kernels") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        int n = 2 + static_cast<int>(rng() % 8);
        CostKernel k = random_kernel(n, rng);
        Vector f = random_vector(n, rng), g = random_vector(n, rng);
        double scale = 1.0 + k.norm_inf() + f.cwiseAbs().maxCoeff();

        // constant equivariance, within an ulp of the working scale
        Vector shifted = apply_T_minus(k, (f.array() + 2.0).matrix());
        CHECK(((apply_T_minus(k, f).array() + 2.0).matrix() - shifted).cwiseAbs().maxCoeff() <=
              4e-15 * scale);

        // order preservation
        Vector fl = f.cwiseMin(g), fu = f.cwiseMax(g);
        CHECK(((apply_T_minus(k, fu) - apply_T_minus(k, fl)).minCoeff()) >= 0.0);
        CHECK(((apply_T_plus(k, fu) - apply_T_plus(k, fl)).minCoeff()) >= 0.0);

        // non-expansiveness
        CHECK((apply_T_minus(k, f) - apply_T_minus(k, g)).cwiseAbs().maxCoeff() <=
              (f - g).cwiseAbs().maxCoeff() + 1e-12 * scale);

        // T+ T- f <= f <= T- T+ f
        CHECK((apply_T_plus(k, apply_T_minus(k, f)) - f).maxCoeff() <= 1e-12 * scale);
        CHECK((apply_T_minus(k, apply_T_plus(k, f)) - f).minCoeff() >= -1e-12 * scale);
    }
}

TEST_CASE("discounted step contracts") {
    std::mt19937 rng(13);
    CostKernel k = two_point();
    Vector f = Vector::Zero(2);
    Vector t = apply_T_lambda(k, f, 0.5);
    CHECK(t(0) == 0.0);
    CHECK(t(1) == 1.0);
    CHECK_THROWS_AS(apply_T_lambda(k, f, 1.0), DomainError);
    CHECK_THROWS_AS(apply_T_lambda(k, f, 0.0), DomainError);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(rng() % 6);
        CostKernel kr = random_kernel(n, rng);
        Vector a = random_vector(n, rng), b = random_vector(n, rng);
        double lambda = 0.1 + 0.8 * (rng() % 100) / 100.0;
        CHECK((apply_T_lambda(kr, a, lambda) - apply_T_lambda(kr, b, lambda)).cwiseAbs().maxCoeff() <=
              lambda * (a - b).cwiseAbs().maxCoeff() + 1e-14);
    }
}

TEST_CASE("min-plus powers agree with path enumeration") {
    CostKernel k = two_point();
    auto powers = minplus_power(k, 4);
    CHECK(powers[1](1, 1) == 2.0);  // both two-step loops at b cost 2
    CHECK(powers[0](1, 1) == 1.0);

    CostKernel kc = constant_kernel(4, 0.75);
    auto cp = minplus_power(kc, 5);
    for (int m = 0; m < 5; ++m) CHECK(cp[m](1, 2) == doctest::Approx(0.75 * (m + 1)));

    std::mt19937 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        CostKernel kr = random_kernel(5, rng);
        auto p = minplus_power(kr, 6);
        for (int m = 1; m <= 6; ++m)
            for (int x = 0; x < 5; ++x)
                for (int y = 0; y < 5; ++y)
                    CHECK(p[m - 1](x, y) ==
                          doctest::Approx(brute_cn(kr.entries(), m, x, y)).epsilon(1e-12));
        // Chapman-Kolmogorov for the semiring product
        Matrix lhs = minplus_product(p[1], p[3]);
        CHECK((lhs - p[5]).cwiseAbs().maxCoeff() <= 1e-12);
    }
    CHECK_THROWS_AS(minplus_power(two_point(), 10, 64), DomainError);
}

TEST_CASE("Karp critical value") {
    CHECK(critical_value_karp(two_point()).value == 0.0);
    CHECK(critical_value_karp(constant_kernel(5, 0.3)).value == doctest::Approx(-0.3));
    Matrix single(1, 1);
    single << 3.0;
    CHECK(critical_value_karp(build_dense_cost(1, single)).value == -3.0);

    std::mt19937 rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(rng() % 5);
        CostKernel kr = random_kernel(n, rng);
        double karp = critical_value_karp(kr).value;
        CHECK(karp == doctest::Approx(-brute_min_cycle_mean(kr.entries())).epsilon(1e-12));
    }

    SUBCASE("sparse kernels with +inf entries") {
        Matrix m(3, 3);
        m << kInf, 1.0, kInf, kInf, kInf, -0.5, 2.0, kInf, kInf;
        CostKernel k = build_dense_cost(3, m);
        // only cycle: 0 -> 1 -> 2 -> 0, mean (1 - 0.5 + 2)/3
        CHECK(critical_value_karp(k).value == doctest::Approx(-2.5 / 3.0).epsilon(1e-14));
    }
}

TEST_CASE("discounted critical value matches Karp") {
    std::vector<double> sched = {0.9, 0.99, 0.999};
    CriticalValue cv = critical_value_discounted(two_point(), sched);
    CHECK(cv.value == doctest::Approx(0.0).epsilon(1e-3));

    CriticalValue cc = critical_value_discounted(constant_kernel(4, 1.5), sched);
    CHECK(cc.value == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(cc.residual <= 1e-12);

    std::mt19937 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        CostKernel kr = random_kernel(20, rng);
        double karp = critical_value_karp(kr).value;
        std::vector<double> tight;
        for (int k = 4; k <= 24; ++k) tight.push_back(1.0 - std::ldexp(1.0, -k));
        CHECK(critical_value_discounted(kr, tight).value == doctest::Approx(karp).epsilon(1e-6));
    }
    CHECK_THROWS_AS(critical_value_discounted(two_point(), {0.9, 0.5}), DomainError);
}

TEST_CASE("asymptotic rate of the iterated semigroup") {
    CHECK(asymptotic_rate(two_point(), Vector::Zero(2), 100) <= 0.05);

    std::mt19937 rng(29);
    Vector v = random_vector(6, rng);
    CostKernel kc = constant_kernel(6, 0.4);
    double amp = v.maxCoeff() - v.minCoeff();
    CHECK(asymptotic_rate(kc, v, 3) <= amp / 3.0 + 1e-12);
    CHECK(asymptotic_rate(kc, v, 50) <= amp / 50.0 + 1e-12);

    // O(1/n) decay, empirical exponent at least 0.9; the corrected iterates
    // are eventually periodic in n, so average the residual over a window
    for (int trial = 0; trial < 3; ++trial) {
        CostKernel kr = random_kernel(6, rng);
        Vector w = random_vector(6, rng);
        std::vector<double> ns = {12, 24, 48, 96, 192};
        std::vector<double> lx, ly;
        for (double n : ns) {
            double r = 0.0;
            for (int d = 0; d < 6; ++d) r += asymptotic_rate(kr, w, static_cast<int>(n) + d);
            r /= 6.0;
            if (r < 1e-14) r = 1e-14;
            lx.push_back(std::log(n));
            ly.push_back(std::log(r));
        }
        double mx = 0, my = 0;
        for (size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += ly[i];
        }
        mx /= lx.size();
        my /= ly.size();
        double num = 0, den = 0;
        for (size_t i = 0; i < lx.size(); ++i) {
            num += (lx[i] - mx) * (ly[i] - my);
            den += (lx[i] - mx) * (lx[i] - mx);
        }
        CHECK(num / den <= -0.9);
    }
}

TEST_CASE("subsolution property is stable under the semigroup") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 3 + static_cast<int>(rng() % 5);
        CostKernel k = random_kernel(n, rng);
        Vector u = random_vector(n, rng);
        // tighten C until u is exactly a C-subsolution
        double C = -kInf;
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) C = std::max(C, u(y) - u(x) - k(x, y));
        Vector tu = apply_T_minus(k, u);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                CHECK(tu(y) - tu(x) <= k(x, y) + C + 1e-12);
    }
}
