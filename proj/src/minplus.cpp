#include "weakkam/minplus.hpp"
#include "weakkam/discounted.hpp"

#include <algorithm>
#include <cmath>

namespace weakkam {

Vector apply_T_minus(const CostKernel& c, const Vector& f, std::vector<int>* argmin) {
    const int n = c.size();
    if (f.size() != n) throw DomainError("apply_T_minus: size mismatch");
    const Matrix& m = c.entries();
    Vector out(n);
    if (argmin) argmin->assign(n, -1);
    for (int x = 0; x < n; ++x) {
        double best = kInf;
        int arg = -1;
        for (int y = 0; y < n; ++y) {
            double v = f(y) + m(y, x);
            if (v < best) {
                best = v;
                arg = y;
            }
        }
        out(x) = best;
        if (argmin) (*argmin)[x] = arg;
    }
    return out;
}

Vector apply_T_plus(const CostKernel& c, const Vector& f, std::vector<int>* argmax) {
    const int n = c.size();
    if (f.size() != n) throw DomainError("apply_T_plus: size mismatch");
    const Matrix& m = c.entries();
    Vector out(n);
    if (argmax) argmax->assign(n, -1);
    for (int x = 0; x < n; ++x) {
        double best = -kInf;
        int arg = -1;
        for (int y = 0; y < n; ++y) {
            double v = f(y) - m(x, y);
            if (v > best) {
                best = v;
                arg = y;
            }
        }
        out(x) = best;
        if (argmax) (*argmax)[x] = arg;
    }
    return out;
}

Vector apply_T_lambda(const CostKernel& c, const Vector& f, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("apply_T_lambda: lambda must be in (0,1)");
    return apply_T_minus(c, lambda * f);
}

Matrix minplus_product(const Matrix& a, const Matrix& b) {
    const int n = static_cast<int>(a.rows());
    if (a.cols() != n || b.rows() != n || b.cols() != n)
        throw DomainError("minplus_product: square matrices of equal size required");
    Matrix r(n, n);
    for (int j = 0; j < n; ++j) {
        r.col(j).setConstant(kInf);
        for (int k = 0; k < n; ++k) {
            double bkj = b(k, j);
            if (!std::isfinite(bkj)) continue;
            r.col(j) = r.col(j).cwiseMin((a.col(k).array() + bkj).matrix());
        }
    }
    return r;
}

std::vector<Matrix> minplus_power(const CostKernel& c, int n, long budget) {
    if (n < 1) throw DomainError("minplus_power: n must be >= 1");
    const long sz = static_cast<long>(c.size()) * c.size();
    if (sz * n * static_cast<long>(sizeof(double)) > budget)
        throw DomainError("minplus_power: memory budget exceeded");
    std::vector<Matrix> out;
    out.reserve(n);
    out.push_back(c.entries());
    for (int k = 1; k < n; ++k) out.push_back(minplus_product(out.back(), c.entries()));
    return out;
}

CriticalValue critical_value_karp(const CostKernel& c) {
    const int n = c.size();
    const Matrix& m = c.entries();
    // Walk costs with free start: E_0 = 0, E_{k+1}(v) = min_u E_k(u) + c(u,v).
    // The super-source variant of Karp's theorem gives the minimum cycle mean
    // as min_v max_k (E_n(v) - E_k(v)) / (n - k).
    Matrix E(n, n + 1);
    E.col(0).setZero();
    for (int k = 1; k <= n; ++k) {
        for (int v = 0; v < n; ++v) {
            double best = kInf;
            for (int u = 0; u < n; ++u) {
                double w = E(u, k - 1) + m(u, v);
                if (w < best) best = w;
            }
            E(v, k) = best;
        }
    }
    double mu = kInf;
    for (int v = 0; v < n; ++v) {
        if (!std::isfinite(E(v, n))) continue;
        double worst = -kInf;
        for (int k = 0; k < n; ++k) {
            if (!std::isfinite(E(v, k))) continue;
            worst = std::max(worst, (E(v, n) - E(v, k)) / (n - k));
        }
        mu = std::min(mu, worst);
    }
    if (!std::isfinite(mu)) throw NumericalError("critical_value_karp: no cycle found");
    CriticalValue cv;
    cv.value = -mu;
    cv.method = CriticalValue::Method::karp;
    cv.residual = 0.0;
    return cv;
}

CriticalValue critical_value_discounted(const CostKernel& c, const std::vector<double>& schedule) {
    if (schedule.empty()) throw DomainError("critical_value_discounted: empty schedule");
    for (size_t k = 0; k + 1 < schedule.size(); ++k)
        if (!(schedule[k] < schedule[k + 1]))
            throw DomainError("critical_value_discounted: schedule must increase toward 1");
    double prev = kInf;
    double prev_lambda = 0.0;
    double est = 0.0, spread = 0.0;
    for (double lambda : schedule) {
        DiscountedSolve s = solve_u_lambda(c, lambda);
        Vector scaled = -(1.0 - lambda) * s.u;
        est = scaled(0);
        spread = scaled.maxCoeff() - scaled.minCoeff();
        if (std::isfinite(prev)) {
            // -(1-l)u_l = c[0] + O(1-l), so successive estimates may differ
            // by at most a multiple of the previous gap to 1.
            double tol = 8.0 * (1.0 - prev_lambda) * (1.0 + c.norm_inf()) + 1e-9;
            if (std::abs(est - prev) > tol)
                throw NumericalError("critical_value_discounted: estimates not Cauchy");
        }
        prev = est;
        prev_lambda = lambda;
    }
    CriticalValue cv;
    cv.value = est;
    cv.method = CriticalValue::Method::discounted;
    cv.residual = spread;
    return cv;
}

CriticalValue critical_value(const CostKernel& c) {
    if (c.has_callable() && c.size() > 2048) {
        std::vector<double> schedule;
        for (int k = 4; k <= 24; ++k) schedule.push_back(1.0 - std::ldexp(1.0, -k));
        return critical_value_discounted(c, schedule);
    }
    return critical_value_karp(c);
}

double asymptotic_rate(const CostKernel& c, const Vector& v, int n) {
    if (n < 1) throw DomainError("asymptotic_rate: n must be >= 1");
    double c0 = critical_value_karp(c).value;
    Vector w = v;
    for (int k = 0; k < n; ++k) w = apply_T_minus(c, w);
    return (w / double(n) + Vector::Constant(v.size(), c0)).cwiseAbs().maxCoeff();
}

}  // namespace weakkam
