#pragma once

#include "weakkam/aubry.hpp"

#include <map>

namespace weakkam {

/// Sparse nonnegative weights on X x X with equal marginals and total
/// mass one.
struct ClosedMeasure {
    int n = 0;
    std::vector<std::tuple<int, int, double>> weights;  // (i, j, w), w > 0

    double mass() const {
        double s = 0.0;
        for (auto& [i, j, w] : weights) s += w;
        return s;
    }
    Vector first_marginal() const {
        Vector m = Vector::Zero(n);
        for (auto& [i, j, w] : weights) m(i) += w;
        return m;
    }
    Vector second_marginal() const {
        Vector m = Vector::Zero(n);
        for (auto& [i, j, w] : weights) m(j) += w;
        return m;
    }
    double marginal_residual() const {
        return (first_marginal() - second_marginal()).cwiseAbs().maxCoeff();
    }
    double cost_integral(const CostKernel& c) const {
        double s = 0.0;
        for (auto& [i, j, w] : weights) s += w * c(i, j);
        return s;
    }
    void validate() const {
        for (auto& [i, j, w] : weights) {
            if (i < 0 || i >= n || j < 0 || j >= n) throw DomainError("ClosedMeasure: index out of range");
            if (!(w >= 0.0)) throw DomainError("ClosedMeasure: negative weight");
        }
        if (std::abs(mass() - 1.0) > 1e-12) throw DomainError("ClosedMeasure: mass must be 1");
        if (marginal_residual() > 1e-10) throw DomainError("ClosedMeasure: marginals differ");
    }
};

/// Uniform measure on the arcs of a cycle (v_0, ..., v_{L-1}, v_0).
ClosedMeasure cycle_measure(int n, const std::vector<int>& cycle);

struct LpResult {
    double value = 0.0;
    ClosedMeasure measure;
    int iterations = 0;
};

/// min integral of c over closed probability measures, by a dense
/// two-phase simplex with Bland's rule. The optimum is -c[0] and the
/// returned vertex is uniform on a single simple cycle.
LpResult lp_min_cost(const CostKernel& c, int cap = 60);

/// Extremal Mather measures: uniform measures on the simple cycles of the
/// directed graph (A, A-hat) whose mean cost is -c[0].
struct MatherFamily {
    std::vector<ClosedMeasure> extremals;
    std::vector<std::vector<int>> cycles;
    double lp_value = 0.0;  // -c[0]
    bool capped = false;
};

MatherFamily extremal_measures(const CostKernel& c, const AubryData& a, int cap = 100000);

struct MatherSet {
    std::vector<int> projected;
    std::vector<std::pair<int, int>> pairs;
};

MatherSet mather_set(const MatherFamily& f);

/// Average lifted displacement of a measure on a circle-grid kernel.
double rotation_number_of_measure(const CostKernel& c, const ClosedMeasure& mu);

/// All simple cycles of a digraph on [0,n) given by arc list, Johnson's
/// algorithm, self-loops included. Stops at `cap` cycles (reported via
/// the return flag).
bool enumerate_simple_cycles(int n, const std::vector<std::pair<int, int>>& arcs, int cap,
                             std::vector<std::vector<int>>& out);

}  // namespace weakkam
