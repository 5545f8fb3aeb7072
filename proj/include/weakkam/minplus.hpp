#pragma once

#include "weakkam/space_cost.hpp"

namespace weakkam {

/// Negative Lax-Oleinik step: (T-f)(x) = min_y f(y) + c(y,x).
/// Ties go to the smallest y; argmin indices are reported on request.
Vector apply_T_minus(const CostKernel& c, const Vector& f, std::vector<int>* argmin = nullptr);

/// Positive Lax-Oleinik step: (T+f)(x) = max_y f(y) - c(x,y).
Vector apply_T_plus(const CostKernel& c, const Vector& f, std::vector<int>* argmax = nullptr);

/// Discounted step T-(lambda f), a lambda-contraction for the sup-norm.
Vector apply_T_lambda(const CostKernel& c, const Vector& f, double lambda);

/// Min-plus product r(i,j) = min_k a(i,k) + b(k,j) on raw matrices.
Matrix minplus_product(const Matrix& a, const Matrix& b);

/// The n-step cost matrices c_1, ..., c_n (c_{k+1} = c_k (x) c).
std::vector<Matrix> minplus_power(const CostKernel& c, int n, long budget = 512L * 1024 * 1024);

struct CriticalValue {
    enum class Method { karp, discounted };
    double value = 0.0;
    Method method = Method::karp;
    double residual = 0.0;
};

/// Critical constant c[0] = -(minimum cycle mean), by Karp's recurrence on
/// the dense kernel. Exact up to rounding; residual reports the float
/// spread among candidate optima.
CriticalValue critical_value_karp(const CostKernel& c);

/// Critical constant estimated as lim -(1-lambda) u_lambda along a schedule
/// of discounts increasing to 1; residual is the spread of the estimate
/// over base points at the last schedule entry.
CriticalValue critical_value_discounted(const CostKernel& c, const std::vector<double>& schedule);

/// Dispatch per storage: Karp for dense kernels, the discounted route for
/// kernels built from a callable.
CriticalValue critical_value(const CostKernel& c);

/// Sup-norm of T^{-n} v / n + c[0]; decays like O(1/n).
double asymptotic_rate(const CostKernel& c, const Vector& v, int n);

}  // namespace weakkam
