#include "weakkam/aubry.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace weakkam {

namespace {

// Uniform bound on the corrected powers; correct c[0] keeps the whole
// sequence inside it, a wrong one drifts linearly and trips it.
double power_bound(int n, double scale) { return 2.0 * (n + 2) * (scale + 1.0); }

double max_abs_finite(const Matrix& m) {
    double r = 0.0;
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i)
            if (std::isfinite(m(i, j))) r = std::max(r, std::abs(m(i, j)));
    return r;
}

bool approx_eq(const Matrix& a, const Matrix& b, double eps) {
    for (int j = 0; j < a.cols(); ++j)
        for (int i = 0; i < a.rows(); ++i) {
            double x = a(i, j), y = b(i, j);
            if (std::isfinite(x) != std::isfinite(y)) return false;
            if (std::isfinite(x) && std::abs(x - y) > eps) return false;
        }
    return true;
}

Matrix corrected_kernel(const CostKernel& c, double c0) {
    Matrix C = c.entries();
    for (int j = 0; j < C.cols(); ++j)
        for (int i = 0; i < C.rows(); ++i)
            if (std::isfinite(C(i, j))) C(i, j) += c0;
    return C;
}

void fill_defaults(const CostKernel& c, PeierlsOptions& opt, bool row_mode) {
    const long n = c.size();
    if (opt.eps <= 0.0) opt.eps = eps_num(c);
    if (opt.max_steps <= 0) {
        // real-weight kernels can have transients far beyond the 4n^2
        // integer-weight cyclicity figure when two cycle means nearly tie,
        // so the default is driven by an operation budget instead
        long ops_budget = row_mode ? 4000000000L : 60000000000L;
        long affordable = std::max<long>(256, ops_budget / std::max<long>(1, row_mode ? n * n : n * n * n));
        opt.max_steps = std::max(4 * n * n + n, std::min(affordable, 200000L));
    }
}

// Every barrier row must be a weak KAM solution: h = (h (x) c) + c[0].
// A failure means the power sequence never settled (wrong c[0], or the
// step cap cut a long transient short).
void verify_barrier(const CostKernel& c, const BarrierData& b) {
    Matrix img = minplus_product(b.h, c.entries());
    double res = 0.0;
    for (int j = 0; j < img.cols(); ++j)
        for (int i = 0; i < img.rows(); ++i) res = std::max(res, std::abs(b.h(i, j) - img(i, j) - b.c0));
    if (res > 1e3 * b.eps)
        throw NumericalError("peierls_barrier: rows fail the fixed-point identity (residual " +
                             std::to_string(res) + "); wrong c[0] or transient beyond the step cap");
}

}  // namespace

BarrierData peierls_barrier(const CostKernel& c, double c0, PeierlsOptions opt) {
    fill_defaults(c, opt, false);
    const Matrix C = corrected_kernel(c, c0);
    const double bound = power_bound(c.size(), max_abs_finite(C));
    long steps = 1;  // D_1 computed

    auto advance = [&](Matrix& m) {
        m = minplus_product(m, C);
        ++steps;
        if (max_abs_finite(m) > bound)
            throw NumericalError("peierls_barrier: power sequence diverges (wrong c[0]?)");
    };

    // Brent cycle detection on the sequence D_k = c_k + k c[0].
    Matrix tortoise = C;
    Matrix hare = minplus_product(C, C);
    ++steps;
    long power = 1, lam = 1;
    bool found = true;
    Matrix tail_min;   // fallback accumulator over the last quarter
    long fallback_from = (3 * opt.max_steps) / 4;
    long tail_count = 0;
    while (!approx_eq(tortoise, hare, opt.eps)) {
        if (power == lam) {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        advance(hare);
        ++lam;
        if (steps >= fallback_from) {
            if (tail_count == 0) tail_min = hare;
            else tail_min = tail_min.cwiseMin(hare);
            ++tail_count;
        }
        if (steps >= opt.max_steps) {
            found = false;
            break;
        }
    }

    BarrierData b;
    b.c0 = c0;
    b.eps = opt.eps;
    if (!found) {
        while (steps < opt.max_steps + opt.max_steps / 4) {
            advance(hare);
            tail_min = tail_min.cwiseMin(hare);
        }
        b.h = tail_min;
        b.fallback = true;
        b.tail_start = static_cast<int>(fallback_from);
        b.period = 0;
        verify_barrier(c, b);
        return b;
    }

    const int sigma = static_cast<int>(lam);
    // Smallest N0 with D_{N0} ~ D_{N0 + sigma}.
    Matrix t2 = C;
    Matrix h2 = C;
    for (int i = 0; i < sigma; ++i) advance(h2);
    int mu = 1;
    while (!approx_eq(t2, h2, opt.eps)) {
        advance(t2);
        advance(h2);
        ++mu;
        if (steps >= 4 * opt.max_steps)
            throw NumericalError("peierls_barrier: periodicity start not found");
    }

    Matrix h = t2;
    Matrix cur = t2;
    for (int i = 1; i < sigma; ++i) {
        advance(cur);
        h = h.cwiseMin(cur);
    }
    b.h = std::move(h);
    b.tail_start = mu;
    b.period = sigma;
    verify_barrier(c, b);
    return b;
}

Vector peierls_row(const CostKernel& c, double c0, int x0, PeierlsOptions opt) {
    fill_defaults(c, opt, true);
    const int n = c.size();
    if (x0 < 0 || x0 >= n) throw DomainError("peierls_row: bad base point");
    const Matrix C = corrected_kernel(c, c0);
    const double bound = power_bound(n, max_abs_finite(C));

    auto step = [&](const Eigen::RowVectorXd& r) -> Eigen::RowVectorXd {
        Eigen::RowVectorXd out(n);
        out.setConstant(kInf);
        for (int k = 0; k < n; ++k) {
            double rk = r(k);
            if (!std::isfinite(rk)) continue;
            out = out.cwiseMin((C.row(k).array() + rk).matrix());
        }
        double m = 0.0;
        for (int j = 0; j < n; ++j)
            if (std::isfinite(out(j))) m = std::max(m, std::abs(out(j)));
        if (m > bound) throw NumericalError("peierls_row: power sequence diverges (wrong c[0]?)");
        return out;
    };

    auto approx = [&](const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
        for (int j = 0; j < n; ++j) {
            if (std::isfinite(a(j)) != std::isfinite(b(j))) return false;
            if (std::isfinite(a(j)) && std::abs(a(j) - b(j)) > opt.eps) return false;
        }
        return true;
    };

    Eigen::RowVectorXd row1 = C.row(x0);
    Eigen::RowVectorXd tortoise = row1;
    Eigen::RowVectorXd hare = step(row1);
    long steps = 2, power = 1, lam = 1;
    Eigen::RowVectorXd tail_min;
    long fallback_from = (3 * opt.max_steps) / 4;
    long tail_count = 0;
    bool found = true;
    while (!approx(tortoise, hare)) {
        if (power == lam) {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare = step(hare);
        ++steps;
        ++lam;
        if (steps >= fallback_from) {
            if (tail_count == 0) tail_min = hare;
            else tail_min = tail_min.cwiseMin(hare);
            ++tail_count;
        }
        if (steps >= opt.max_steps) {
            found = false;
            break;
        }
    }
    auto verify_row = [&](const Eigen::RowVectorXd& row) {
        Vector u = row.transpose();
        Vector img = apply_T_minus(c, u);
        double res = (u - (img.array() + c0).matrix()).cwiseAbs().maxCoeff();
        if (res > 1e3 * opt.eps)
            throw NumericalError("peierls_row: row fails the fixed-point identity (residual " +
                                 std::to_string(res) + ")");
        return u;
    };
    if (!found) {
        while (steps < opt.max_steps + opt.max_steps / 4) {
            hare = step(hare);
            ++steps;
            tail_min = tail_min.cwiseMin(hare);
        }
        return verify_row(tail_min);
    }
    const long sigma = lam;
    Eigen::RowVectorXd t2 = row1;
    Eigen::RowVectorXd h2 = row1;
    for (long i = 0; i < sigma; ++i) h2 = step(h2);
    while (!approx(t2, h2)) {
        t2 = step(t2);
        h2 = step(h2);
        steps += 2;
        if (steps >= 8 * opt.max_steps)
            throw NumericalError("peierls_row: periodicity start not found");
    }
    Eigen::RowVectorXd acc = t2;
    Eigen::RowVectorXd cur = t2;
    for (long i = 1; i < sigma; ++i) {
        cur = step(cur);
        acc = acc.cwiseMin(cur);
    }
    return verify_row(acc);
}

AubryData aubry_sets(const CostKernel& c, const BarrierData& b, double eps_A) {
    const int n = c.size();
    if (b.h.rows() != n || b.h.cols() != n) throw DomainError("aubry_sets: barrier size mismatch");
    if (eps_A <= 0.0) eps_A = eps_aubry(c);
    AubryData a;
    a.tolerance = eps_A;
    for (int x = 0; x < n; ++x)
        if (std::abs(b.h(x, x)) <= eps_A) a.projected.push_back(x);
    if (a.projected.empty())
        throw NumericalError("aubry_sets: empty projected Aubry set (eps_A too small?)");
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            double v = c(x, y);
            if (!std::isfinite(v)) continue;
            if (std::abs(v + b.c0 + b.h(y, x)) <= eps_A) a.pairs.emplace_back(x, y);
        }
    a.successors.resize(a.projected.size());
    for (size_t k = 0; k < a.projected.size(); ++k)
        for (auto& [x, y] : a.pairs)
            if (x == a.projected[k]) a.successors[k].push_back(y);
    return a;
}

SubsolutionCheck is_subsolution(const CostKernel& c, const Vector& u, double C, double eps) {
    if (eps <= 0.0) eps = eps_num(c);
    const int n = c.size();
    if (u.size() != n) throw DomainError("is_subsolution: size mismatch");
    SubsolutionCheck r;
    r.max_violation = -kInf;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            double cxy = c(x, y);
            if (!std::isfinite(cxy)) continue;
            double viol = u(y) - u(x) - cxy - C;
            if (viol > r.max_violation) {
                r.max_violation = viol;
                r.worst_x = x;
                r.worst_y = y;
            }
        }
    if (!std::isfinite(r.max_violation)) r.max_violation = 0.0;
    r.max_violation = std::max(r.max_violation, 0.0);
    r.ok = r.max_violation <= eps;
    return r;
}

Vector weak_kam_from_barrier(const CostKernel& c, const BarrierData& b, int x, bool dual,
                             double* residual) {
    const int n = c.size();
    if (x < 0 || x >= n) throw DomainError("weak_kam_from_barrier: bad base point");
    Vector u;
    double res;
    if (!dual) {
        u = b.h.row(x).transpose();
        res = (u - (apply_T_minus(c, u).array() + b.c0).matrix()).cwiseAbs().maxCoeff();
    } else {
        u = -b.h.col(x);
        res = (u - (apply_T_plus(c, u).array() - b.c0).matrix()).cwiseAbs().maxCoeff();
    }
    if (residual) *residual = res;
    double tol = std::max(100.0 * b.eps, 1e-8 * (1.0 + c.norm_inf()));
    if (res > tol)
        throw NumericalError("weak_kam_from_barrier: fixed-point residual " + std::to_string(res) +
                             " exceeds tolerance (barrier inaccurate?)");
    return u;
}

Vector extend_from_aubry(const BarrierData& b, const AubryData& a, const std::vector<double>& f) {
    if (f.size() != a.projected.size())
        throw DomainError("extend_from_aubry: data size must match the projected Aubry set");
    const double slack = std::max(10.0 * b.eps, a.tolerance);
    for (size_t i = 0; i < a.projected.size(); ++i)
        for (size_t j = 0; j < a.projected.size(); ++j) {
            int x = a.projected[i], y = a.projected[j];
            if (f[j] - f[i] > b.h(x, y) + slack)
                throw DomainError("extend_from_aubry: data not dominated by the barrier at pair (" +
                                  std::to_string(x) + "," + std::to_string(y) + ")");
        }
    const int n = static_cast<int>(b.h.rows());
    Vector u(n);
    for (int x = 0; x < n; ++x) {
        double best = kInf;
        for (size_t j = 0; j < a.projected.size(); ++j)
            best = std::min(best, f[j] + b.h(a.projected[j], x));
        u(x) = best;
    }
    return u;
}

std::pair<Vector, Vector> conjugate_pair(const CostKernel& c, const Vector& u, double c0, int n_max) {
    const double eps = eps_num(c);
    SubsolutionCheck sc = is_subsolution(c, u, c0, 10.0 * eps);
    if (!sc.ok)
        throw DomainError("conjugate_pair: u is not a c[0]-subsolution (violation " +
                          std::to_string(sc.max_violation) + ")");
    Vector u_minus = u, u_plus = u;
    for (int k = 0; k < n_max; ++k) {
        Vector next = (apply_T_minus(c, u_minus).array() + c0).matrix();
        if ((next - u_minus).minCoeff() < -10.0 * eps)
            throw NumericalError("conjugate_pair: non-monotone negative iteration");
        double d = (next - u_minus).cwiseAbs().maxCoeff();
        u_minus = next;
        if (d <= eps) break;
        if (k + 1 == n_max) throw NumericalError("conjugate_pair: negative iteration cap reached");
    }
    for (int k = 0; k < n_max; ++k) {
        Vector next = (apply_T_plus(c, u_plus).array() - c0).matrix();
        if ((next - u_plus).maxCoeff() > 10.0 * eps)
            throw NumericalError("conjugate_pair: non-monotone positive iteration");
        double d = (next - u_plus).cwiseAbs().maxCoeff();
        u_plus = next;
        if (d <= eps) break;
        if (k + 1 == n_max) throw NumericalError("conjugate_pair: positive iteration cap reached");
    }
    return {u_minus, u_plus};
}

Vector strict_subsolution(const CostKernel& c, const BarrierData& b, const AubryData& a) {
    const int n = c.size();
    std::set<std::pair<int, int>> aubry(a.pairs.begin(), a.pairs.end());
    double delta = std::max(1e-3 * (1.0 + c.norm_inf()), 1e3 * b.eps);
    const double floor = 100.0 * b.eps;
    while (true) {
        // potentials of the arc weights c + c[0] - delta [arc outside Aubry],
        // from a super-source; a negative cycle means delta is too large
        Vector d = Vector::Zero(n);
        bool negative_cycle = false;
        for (int round = 0; round < n + 1; ++round) {
            bool relaxed = false;
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z) {
                    double cyz = c(y, z);
                    if (!std::isfinite(cyz)) continue;
                    double w = cyz + b.c0 - (aubry.count({y, z}) ? 0.0 : delta);
                    if (d(y) + w < d(z) - 1e-15) {
                        d(z) = d(y) + w;
                        relaxed = true;
                    }
                }
            if (!relaxed) break;
            if (round == n) negative_cycle = true;
        }
        if (!negative_cycle) {
            d.array() -= d.minCoeff();
            return d;
        }
        delta *= 0.5;
        if (delta < floor)
            throw NumericalError("strict_subsolution: no strict slack found (Aubry set too coarse?)");
    }
}

}  // namespace weakkam
