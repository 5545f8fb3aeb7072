#pragma once

#include "weakkam/aubry.hpp"

#include <functional>

namespace weakkam {

/// Periodic generating function of an exact conservative twist map in
/// (theta, Theta) coordinates, with its two partial derivatives. The map
/// itself is recovered from r = -dS1, R = dS2.
struct GeneratingFunction {
    std::function<double(double, double)> S;
    std::function<double(double, double)> dS1;
    std::function<double(double, double)> dS2;
    std::string family;  // "integrable" | "standard" | "custom"
    double param = 0.0;
};

/// S(t,T) = (T-t)^2/2, the map (theta, r) -> (theta + r, r).
GeneratingFunction make_generating_integrable();

/// S(t,T) = (T-t)^2/2 + eps cos(2 pi t)/(4 pi^2), the standard family
/// F_eps(theta, r) = (theta + r - eps sin(2 pi theta)/(2 pi), r - eps sin(2 pi theta)/(2 pi)).
GeneratingFunction make_generating_standard(double eps);

/// Wraps user callables after validating periodicity, the sign of the
/// mixed derivative, superlinearity, and consistency of dS1/dS2 with S.
GeneratingFunction make_generating_custom(std::function<double(double, double)> S,
                                          std::function<double(double, double)> dS1,
                                          std::function<double(double, double)> dS2);

/// Cost at cohomology c on the circle grid: per pair the minimum over
/// integer lifts within [-K, K] of S(theta, Theta + m) + c (theta - Theta - m),
/// with the minimizing real displacement recorded in the kernel.
struct TwistCost {
    GeneratingFunction gen;
    double c = 0.0;
    int grid_n = 0;
    int K = 0;
    CostKernel kernel;
};

int default_lift_window(double c);
TwistCost twist_cost(const GeneratingFunction& g, double c, int grid_n, int K = 0);

/// Mather's alpha function: the critical value of the twist kernel.
double alpha_of_c(const GeneratingFunction& g, double c, int grid_n, int K = 0);

/// A backward minimizing chain calibrating a weak KAM solution, with
/// lifted positions, conjugate momenta, and the drift estimate.
struct Chain {
    double c = 0.0;
    std::vector<double> theta_lift;  // chronological: theta_{-H} ... theta_0
    std::vector<double> momenta;     // r_k = dS2(theta_{k-1}, theta_k), size H
    double rho = 0.0;
    double max_window_deviation = 0.0;  // max_k |theta_k - theta_0 - k rho|
    double max_el_residual = 0.0;       // discrete Euler-Lagrange residual
};

Chain backward_chain(const TwistCost& tc, double alpha_c, const Vector& u, int start_index,
                     int horizon, double calib_tol = 0.0);

/// Drift per step of a backward calibrating chain at cohomology c.
double rotation_number(const GeneratingFunction& g, double c, int grid_n, int K = 0,
                       int horizon = 400);

/// Discrete Legendre transform of sampled (c, alpha(c)) pairs. Flags
/// rho0 outside the sampled slope range as extrapolation.
double beta_from_alpha(const std::vector<std::pair<double, double>>& samples, double rho0,
                       bool* extrapolated = nullptr);

/// Midpoint-convexity scan of a sampled function; returns the worst
/// violation (positive means convexity failed by that much).
double convexity_violation(const std::vector<std::pair<double, double>>& samples);

struct PseudographPoint {
    double theta = 0.0;
    double r_minus = 0.0;
    double r_plus = 0.0;
};

/// One-sided momenta c + one-sided slopes of u on the circle grid.
/// Checks semiconcavity r_plus <= r_minus + tol.
std::vector<PseudographPoint> pseudograph(const Vector& u, double c, const FiniteSpace& space,
                                          double semiconcavity_tol);

/// Crossing events between two chains over a common index range: maximal
/// runs of coincidence count once, as do transversal sign changes.
struct CrossingCount {
    int total = 0;
    bool first_at_start = false;
    bool last_at_end = false;
};

CrossingCount count_crossings(const Chain& a, const Chain& b, double tol = 1e-9);

}  // namespace weakkam
