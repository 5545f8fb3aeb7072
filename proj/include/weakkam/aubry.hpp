#pragma once

#include "weakkam/minplus.hpp"

namespace weakkam {

/// Default numerical slack: barrier errors accumulate over the min-plus
/// power sequence, membership tests are three orders looser.
inline double eps_num(const CostKernel& c) { return 1e-9 * (1.0 + c.norm_inf()); }
inline double eps_aubry(const CostKernel& c) { return 1e-6 * (1.0 + c.norm_inf()); }

struct PeierlsOptions {
    long max_steps = 0;  // 0: 4n^2 + n, clamped by an operation budget
    double eps = 0.0;    // 0: eps_num(kernel)
};

/// Peierls barrier h plus the power-sequence diagnostics: the corrected
/// powers D_n = c_n + n c[0] become periodic at tail_start with the given
/// period, and h is the entrywise min over one period. When no periodicity
/// is detected within the step cap, h falls back to the entrywise min over
/// the last quarter of the computed sequence and fallback is set.
struct BarrierData {
    Matrix h;
    double c0 = 0.0;
    int tail_start = 0;
    int period = 0;
    bool fallback = false;
    double eps = 0.0;
};

BarrierData peierls_barrier(const CostKernel& c, double c0, PeierlsOptions opt = {});

/// Single barrier row h(x0, .), via the same power-sequence detection on
/// row vectors. Cheaper than the full barrier for large kernels.
Vector peierls_row(const CostKernel& c, double c0, int x0, PeierlsOptions opt = {});

/// Projected Aubry set (points with h(x,x) = 0) and 2-Aubry set (pairs
/// with c(x,y) + c[0] + h(y,x) = 0), both up to the tolerance used.
/// successors[k] lists the pair partners of projected[k].
struct AubryData {
    std::vector<int> projected;
    std::vector<std::pair<int, int>> pairs;
    std::vector<std::vector<int>> successors;
    double tolerance = 0.0;
};

AubryData aubry_sets(const CostKernel& c, const BarrierData& b, double eps_A = 0.0);

struct SubsolutionCheck {
    bool ok = false;
    double max_violation = 0.0;
    int worst_x = -1;
    int worst_y = -1;
};

/// Checks u(y) - u(x) <= c(x,y) + C for all pairs; reports the worst one.
SubsolutionCheck is_subsolution(const CostKernel& c, const Vector& u, double C, double eps = 0.0);

/// h(x, .) as a weak KAM solution; with dual set, -h(., x) as a positive
/// weak KAM solution. The fixed-point residual is verified.
Vector weak_kam_from_barrier(const CostKernel& c, const BarrierData& b, int x, bool dual = false,
                             double* residual = nullptr);

/// Extends data on the projected Aubry set to the weak KAM solution
/// u(x) = min_{y in A} f(y) + h(y,x). Requires f(y) - f(x) <= h(x,y) on A.
Vector extend_from_aubry(const BarrierData& b, const AubryData& a, const std::vector<double>& f);

/// Conjugate pair of a subsolution u: the monotone limits of T^{-n}u + n c[0]
/// (non-decreasing) and T^{+n}u - n c[0] (non-increasing).
std::pair<Vector, Vector> conjugate_pair(const CostKernel& c, const Vector& u, double c0,
                                         int n_max = 100000);

/// A critical subsolution that is strict outside the 2-Aubry set:
/// Bellman-Ford potentials for c + c[0] with non-Aubry arcs penalized by
/// the largest delta that keeps every cycle nonnegative.
Vector strict_subsolution(const CostKernel& c, const BarrierData& b, const AubryData& a);

}  // namespace weakkam
