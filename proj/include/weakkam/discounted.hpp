#pragma once

#include "weakkam/mather.hpp"

namespace weakkam {

struct DiscountedSolve {
    double lambda = 0.0;
    Vector u;
    int iterations = 0;  // policy improvements
    double residual = 0.0;
};

/// Unique fixed point of f -> T-(lambda f), solved by policy iteration on
/// the predecessor choice (exact for a finite space, stable for lambda
/// arbitrarily close to 1). The fixed-point residual is verified against
/// 1e-12 * (1 + |u|).
DiscountedSolve solve_u_lambda(const CostKernel& c, double lambda);

/// Dual: unique fixed point of f -> T+(lambda f).
DiscountedSolve solve_v_lambda(const CostKernel& c, double lambda);

/// Default discount schedules.
std::vector<double> lambda_to_one_schedule(int k_min = 4, int k_max = 24);   // 1 - 2^-k
std::vector<double> lambda_to_zero_schedule(int k_min = 2, int k_max = 20);  // 2^-k

/// Limit of u_lambda + c[0]/(1-lambda) along the schedule; stops once two
/// successive schedule entries differ by at most stop_tol (default
/// 10 * eps_aubry). The result is checked to be a weak KAM solution.
Vector limit_u1(const CostKernel& c, double c0, const std::vector<double>& schedule = {},
                double stop_tol = 0.0);

/// Dual limit of v_lambda - c[0]/(1-lambda).
Vector limit_v1(const CostKernel& c, double c0, const std::vector<double>& schedule = {},
                double stop_tol = 0.0);

/// u1(x) = min over extremal Mather measures of the pi_1-average of h(.,x).
/// With a capped family the result is only an upper bound.
Vector formula_u1(const BarrierData& b, const MatherFamily& f, bool* upper_bound = nullptr);

/// v1(x) = max over extremal Mather measures of the pi_1-average of -h(x,.).
Vector formula_v1(const BarrierData& b, const MatherFamily& f, bool* bound_flag = nullptr);

/// The computable conditions equivalent to (u1, v1) forming a conjugate
/// pair: equality on the Aubry set, ordering, and saturation of the
/// Mather-measure averages on both sides.
struct ConjugateReport {
    bool eq_on_aubry = false;
    bool ordered = false;          // u1 >= v1 everywhere
    bool u1_averages_zero = false;
    bool v1_averages_zero = false;
    double tol = 0.0;
    bool conjugate() const { return eq_on_aubry; }
    bool consistent() const {
        return eq_on_aubry == ordered && ordered == u1_averages_zero &&
               u1_averages_zero == v1_averages_zero;
    }
};

ConjugateReport conjugate_pair_test(const Vector& u1, const Vector& v1, const BarrierData& b,
                                    const AubryData& a, const MatherFamily& f, double tol = 0.0);

/// State-dependent discount weight for the degenerate family
/// T-((1 - lambda alpha) v) + c[0]. Hypotheses: values in [0,1), and a
/// positive average against the first marginal of every extremal Mather
/// measure.
struct DegenerateWeight {
    Vector alpha;
    void validate(const MatherFamily& f, double eps_A) const;
};

/// Seeds sandwiching the degenerate solution: the same weak KAM solution
/// shifted nonpositive and nonnegative.
std::pair<Vector, Vector> degenerate_seeds(const BarrierData& b, const MatherFamily& f);

struct DegenerateSolve {
    Vector u;
    double gap = 0.0;  // final distance between the two monotone iterates
    long iterations = 0;
};

/// Monotone sandwich iteration for the unique fixed point of
/// v -> T-((1 - lambda alpha) v) + c[0], from a nonpositive weak KAM
/// solution (non-decreasing) and a nonnegative one (non-increasing).
DegenerateSolve solve_u_lambda_alpha(const CostKernel& c, double c0, const DegenerateWeight& w,
                                     double lambda, const Vector& seed_lo, const Vector& seed_hi,
                                     double gap_tol = 0.0, long max_iter = 400000000L);

/// Limit of u_lambda^alpha as lambda -> 0 along the schedule.
Vector limit_u0_alpha(const CostKernel& c, double c0, const DegenerateWeight& w,
                      const BarrierData& b, const MatherFamily& f,
                      const std::vector<double>& schedule = {}, double stop_tol = 0.0,
                      double gap_tol = 0.0);

/// u0^alpha(x) = min over extremal Mather measures of the alpha-weighted
/// barrier average  [sum alpha(y) h(y,x)] / [sum alpha(y)].
Vector formula_u0_alpha(const BarrierData& b, const MatherFamily& f, const Vector& alpha);

/// Partial sums lambda * sum_k beta_{k+1} along a backward chain of the
/// degenerate solution; bounded uniformly in lambda.
double degenerate_chain_monitor(const CostKernel& c, double c0, const DegenerateWeight& w,
                                double lambda, const Vector& u, int x0, int steps,
                                double bound = 50.0);

/// The triangle counterexample: a 1-Lipschitz self-map of the triangle
/// |x| <= 1/2 - |y + ... | whose discounted fixed-point curve
/// X_lambda = (eps0 sin(ln(1-lambda)), g(lambda)/lambda) does not converge
/// as lambda -> 1.
class TriangleMap {
public:
    TriangleMap(double alpha, double eps0);

    double alpha() const { return alpha_; }
    double eps0() const { return eps0_; }
    double lipschitz_eps() const { return lip_eps_; }

    double epsilon(double y) const;
    std::pair<double, double> map(double x, double y) const;
    bool inside(double x, double y, double slack = 1e-12) const;

    std::pair<double, double> closed_form(double lambda) const;

private:
    double alpha_;
    double eps0_;
    double lip_eps_ = 0.0;
};

struct TriangleFixedPoint {
    double lambda = 0.0;
    double x_iter = 0.0, y_iter = 0.0;
    double x_closed = 0.0, y_closed = 0.0;
    long iterations = 0;
    double mismatch = 0.0;  // 1-norm distance between the two routes
};

std::vector<TriangleFixedPoint> triangle_fixed_points(const TriangleMap& t,
                                                      const std::vector<double>& schedule);

}  // namespace weakkam
