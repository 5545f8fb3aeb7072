#include "weakkam/space_cost.hpp"

#include <algorithm>
#include <cmath>

namespace weakkam {

void CostKernel::validate() const {
    space_.validate();
    const int n = space_.n;
    if (entries_.rows() != n || entries_.cols() != n)
        throw DomainError("CostKernel: entries must be n x n");
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double v = entries_(i, j);
            if (std::isnan(v) || v == -kInf)
                throw DomainError("CostKernel: entries must be finite or +inf");
        }
    for (int i = 0; i < n; ++i) {
        bool row_ok = false, col_ok = false;
        for (int j = 0; j < n; ++j) {
            row_ok = row_ok || std::isfinite(entries_(i, j));
            col_ok = col_ok || std::isfinite(entries_(j, i));
        }
        if (!row_ok) throw DomainError("CostKernel: all-infinite row " + std::to_string(i));
        if (!col_ok) throw DomainError("CostKernel: all-infinite column " + std::to_string(i));
    }
}

CostKernel build_dense_cost(int n, const Matrix& entries) {
    if (entries.rows() != n || entries.cols() != n)
        throw DomainError("build_dense_cost: dimension mismatch");
    return CostKernel(make_space(n), entries, false);
}

CostKernel build_circle_cost(int grid_n, const std::function<double(double, double)>& f,
                             std::optional<int> window) {
    if (grid_n < 2) throw DomainError("build_circle_cost: grid_n must be >= 2");
    FiniteSpace space = make_circle_grid(grid_n);
    Matrix m(grid_n, grid_n);
    Matrix disp(grid_n, grid_n);
    for (int i = 0; i < grid_n; ++i) {
        for (int j = 0; j < grid_n; ++j) {
            double d = lift_min_modulus(space.coords[j] - space.coords[i]);
            disp(i, j) = d;
            if (window) {
                int k = std::abs(j - i);
                k = std::min(k, grid_n - k);
                if (k > *window) {
                    m(i, j) = kInf;
                    continue;
                }
            }
            double v = f(space.coords[i], space.coords[j]);
            if (!std::isfinite(v)) throw DomainError("build_circle_cost: f not finite on the grid");
            m(i, j) = v;
        }
    }
    if (window) {
        for (int i = 0; i < grid_n; ++i) {
            int best = 0;
            double bv = kInf;
            for (int j = 0; j < grid_n; ++j)
                if (m(i, j) < bv) {
                    bv = m(i, j);
                    best = j;
                }
            int k = std::abs(best - i);
            k = std::min(k, grid_n - k);
            if (k >= *window)
                throw NumericalError("build_circle_cost: row " + std::to_string(i) +
                                     " minimizer on window boundary (window too small)");
        }
    }
    auto fn = [f, space](int i, int j) { return f(space.coords[i], space.coords[j]); };
    return CostKernel(space, std::move(m), true).with_displacement(std::move(disp)).with_callable(fn);
}

CostKernel minplus_compose(const CostKernel& a, const CostKernel& b) {
    const int n = a.size();
    if (b.size() != n) throw DomainError("minplus_compose: size mismatch");
    const Matrix& A = a.entries();
    const Matrix& B = b.entries();
    const bool track = a.has_displacement() && b.has_displacement();
    Matrix R(n, n);
    Matrix D;
    if (track) D.resize(n, n);
    Eigen::VectorXi arg(n);
    for (int j = 0; j < n; ++j) {
        R.col(j).setConstant(kInf);
        arg.setConstant(-1);
        for (int k = 0; k < n; ++k) {
            double bkj = B(k, j);
            if (!std::isfinite(bkj)) continue;
            for (int i = 0; i < n; ++i) {
                double v = A(i, k) + bkj;
                if (v < R(i, j)) {
                    R(i, j) = v;
                    arg(i) = k;
                }
            }
        }
        if (track)
            for (int i = 0; i < n; ++i)
                D(i, j) = (arg(i) >= 0) ? a.displacement()(i, arg(i)) + b.displacement()(arg(i), j) : 0.0;
    }
    CostKernel out(a.space(), std::move(R), a.periodic());
    if (track) out = out.with_displacement(std::move(D));
    return out;
}

CostKernel build_action_cost(const ActionDiscretization& a, long budget) {
    if (a.grid_n < 2) throw DomainError("build_action_cost: grid_n must be >= 2");
    if (a.steps_m < 1) throw DomainError("build_action_cost: steps_m must be >= 1");
    if (!a.potential) throw DomainError("build_action_cost: potential not set");
    if (static_cast<long>(a.grid_n) * a.grid_n * a.steps_m > budget)
        throw DomainError("build_action_cost: steps_m * grid_n^2 exceeds budget");

    const double tau = 1.0 / a.steps_m;
    FiniteSpace space = make_circle_grid(a.grid_n);
    Matrix m(a.grid_n, a.grid_n);
    Matrix disp(a.grid_n, a.grid_n);
    for (int i = 0; i < a.grid_n; ++i) {
        double x = space.coords[i];
        for (int j = 0; j < a.grid_n; ++j) {
            double d = lift_min_modulus(space.coords[j] - x);
            double mid = x + 0.5 * d;
            mid -= std::floor(mid);
            double v = a.potential(mid);
            m(i, j) = tau * (0.5 * (d / tau) * (d / tau) - v) - a.cohomology_c * d;
            disp(i, j) = d;
        }
    }
    CostKernel step = CostKernel(space, std::move(m), true).with_displacement(std::move(disp));
    CostKernel out = step;
    for (int k = 1; k < a.steps_m; ++k) out = minplus_compose(out, step);
    return out;
}

}  // namespace weakkam
