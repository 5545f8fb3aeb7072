#include "weakkam/twist.hpp"

#include <algorithm>
#include <cmath>

namespace weakkam {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate_generating(const GeneratingFunction& g, bool check_derivatives) {
    const double pts[] = {-0.75, -0.3, 0.0, 0.2, 0.45, 0.8, 1.1};
    for (double t : pts)
        for (double T : pts) {
            double s = g.S(t, T);
            double sp = g.S(t + 1.0, T + 1.0);
            if (std::abs(sp - s) > 1e-12 * (1.0 + std::abs(s)))
                throw DomainError("generating function: periodicity S(t+1,T+1) = S(t,T) fails");
            const double h = 1e-4;
            double mixed = (g.S(t + h, T + h) - g.S(t + h, T) - g.S(t, T + h) + g.S(t, T)) / (h * h);
            if (!(mixed < 0.0))
                throw DomainError("generating function: mixed derivative must be negative");
            if (check_derivatives) {
                double d1 = (g.S(t + h, T) - g.S(t - h, T)) / (2.0 * h);
                double d2 = (g.S(t, T + h) - g.S(t, T - h)) / (2.0 * h);
                double scale = 1.0 + std::abs(d1) + std::abs(d2);
                if (std::abs(d1 - g.dS1(t, T)) > 1e-5 * scale ||
                    std::abs(d2 - g.dS2(t, T)) > 1e-5 * scale)
                    throw DomainError("generating function: dS1/dS2 disagree with S");
            }
        }
    double prev = -kInf;
    for (double K : {4.0, 8.0, 16.0, 32.0}) {
        double grow = std::min(g.S(0.0, K), g.S(0.0, -K)) / K;
        if (!(grow > prev)) throw DomainError("generating function: superlinearity probe fails");
        prev = grow;
    }
}

}  // namespace

GeneratingFunction make_generating_integrable() {
    GeneratingFunction g;
    g.S = [](double t, double T) { return 0.5 * (T - t) * (T - t); };
    g.dS1 = [](double t, double T) { return t - T; };
    g.dS2 = [](double t, double T) { return T - t; };
    g.family = "integrable";
    validate_generating(g, true);
    return g;
}

GeneratingFunction make_generating_standard(double eps) {
    GeneratingFunction g;
    g.S = [eps](double t, double T) {
        double d = T - t;
        return 0.5 * d * d + eps / (4.0 * kPi * kPi) * std::cos(2.0 * kPi * t);
    };
    g.dS1 = [eps](double t, double T) { return t - T - eps / (2.0 * kPi) * std::sin(2.0 * kPi * t); };
    g.dS2 = [](double t, double T) { return T - t; };
    g.family = "standard";
    g.param = eps;
    validate_generating(g, true);
    // The map reconstructed through r = -dS1, R = dS2 must agree with the
    // defining formulas of the family.
    for (double t : {0.1, 0.25, 0.6}) {
        for (double r : {-0.4, 0.5, 1.2}) {
            double Theta = t + r - eps / (2.0 * kPi) * std::sin(2.0 * kPi * t);
            double R = r - eps / (2.0 * kPi) * std::sin(2.0 * kPi * t);
            if (std::abs(-g.dS1(t, Theta) - r) > 1e-10 || std::abs(g.dS2(t, Theta) - R) > 1e-10)
                throw DomainError("standard family: generating function does not reproduce the map");
        }
    }
    return g;
}

GeneratingFunction make_generating_custom(std::function<double(double, double)> S,
                                          std::function<double(double, double)> dS1,
                                          std::function<double(double, double)> dS2) {
    GeneratingFunction g;
    g.S = std::move(S);
    g.dS1 = std::move(dS1);
    g.dS2 = std::move(dS2);
    g.family = "custom";
    validate_generating(g, true);
    return g;
}

int default_lift_window(double c) { return std::max(2, static_cast<int>(std::ceil(std::abs(c))) + 2); }

TwistCost twist_cost(const GeneratingFunction& g, double c, int grid_n, int K) {
    if (grid_n < 2) throw DomainError("twist_cost: grid_n must be >= 2");
    if (K <= 0) K = default_lift_window(c);
    FiniteSpace space = make_circle_grid(grid_n);
    Matrix m(grid_n, grid_n);
    Matrix disp(grid_n, grid_n);
    for (int i = 0; i < grid_n; ++i) {
        double t = space.coords[i];
        for (int j = 0; j < grid_n; ++j) {
            double base = space.coords[j];
            double best = kInf;
            int best_m = 0;
            for (int lift = -K; lift <= K; ++lift) {
                double T = base + lift;
                double v = g.S(t, T) + c * (t - T);
                if (v < best) {
                    best = v;
                    best_m = lift;
                }
            }
            if (best_m == -K || best_m == K)
                throw NumericalError("twist_cost: lift minimizer on the window boundary (K too small)");
            m(i, j) = best;
            disp(i, j) = base + best_m - t;
        }
    }
    TwistCost tc{g, c, grid_n, K,
                 CostKernel(space, std::move(m), true).with_displacement(std::move(disp))};
    return tc;
}

double alpha_of_c(const GeneratingFunction& g, double c, int grid_n, int K) {
    return critical_value_karp(twist_cost(g, c, grid_n, K).kernel).value;
}

Chain backward_chain(const TwistCost& tc, double alpha_c, const Vector& u, int start_index,
                     int horizon, double calib_tol) {
    const CostKernel& k = tc.kernel;
    const int n = k.size();
    if (start_index < 0 || start_index >= n) throw DomainError("backward_chain: bad start index");
    if (horizon < 2) throw DomainError("backward_chain: horizon must be >= 2");
    if (calib_tol <= 0.0) calib_tol = 1e-6 * (1.0 + k.norm_inf());

    std::vector<int> idx(horizon + 1);
    std::vector<double> lift(horizon + 1);
    idx[horizon] = start_index;
    lift[horizon] = k.space().coords[start_index];
    for (int pos = horizon; pos > 0; --pos) {
        int x = idx[pos];
        int arg = -1;
        double best = kInf;
        for (int y = 0; y < n; ++y) {
            double v = u(y) + k(y, x);
            if (v < best) {
                best = v;
                arg = y;
            }
        }
        double residual = std::abs(best + alpha_c - u(x));
        if (residual > calib_tol)
            throw NumericalError("backward_chain: calibration residual " + std::to_string(residual) +
                                 " at step " + std::to_string(horizon - pos));
        idx[pos - 1] = arg;
        lift[pos - 1] = lift[pos] - k.displacement()(arg, x);
    }

    Chain ch;
    ch.c = tc.c;
    ch.theta_lift = lift;
    ch.momenta.resize(horizon);
    for (int pos = 1; pos <= horizon; ++pos)
        ch.momenta[pos - 1] = tc.gen.dS2(lift[pos - 1], lift[pos]);
    ch.rho = (lift[horizon] - lift[0]) / static_cast<double>(horizon);
    for (int pos = 0; pos <= horizon; ++pos) {
        double kk = static_cast<double>(pos - horizon);  // chain index, 0 at the end
        ch.max_window_deviation =
            std::max(ch.max_window_deviation, std::abs(lift[pos] - lift[horizon] - kk * ch.rho));
    }
    for (int pos = 1; pos + 1 <= horizon; ++pos) {
        double r = tc.gen.dS2(lift[pos - 1], lift[pos]) + tc.gen.dS1(lift[pos], lift[pos + 1]);
        ch.max_el_residual = std::max(ch.max_el_residual, std::abs(r));
    }
    return ch;
}

double rotation_number(const GeneratingFunction& g, double c, int grid_n, int K, int horizon) {
    TwistCost tc = twist_cost(g, c, grid_n, K);
    double ac = critical_value_karp(tc.kernel).value;
    Vector u = peierls_row(tc.kernel, ac, 0);
    double res = (u - (apply_T_minus(tc.kernel, u).array() + ac).matrix()).cwiseAbs().maxCoeff();
    if (res > 1e-7 * (1.0 + tc.kernel.norm_inf()))
        throw NumericalError("rotation_number: barrier row is not a weak KAM solution");
    Chain ch = backward_chain(tc, ac, u, 0, horizon);
    if (ch.max_window_deviation >= 1.0 + 1e-9)
        throw NumericalError("rotation_number: chain leaves the rotation window (deviation " +
                             std::to_string(ch.max_window_deviation) + ")");
    return ch.rho;
}

double beta_from_alpha(const std::vector<std::pair<double, double>>& samples, double rho0,
                       bool* extrapolated) {
    if (samples.size() < 2) throw DomainError("beta_from_alpha: need at least two samples");
    double best = -kInf;
    for (auto& [c, a] : samples) best = std::max(best, rho0 * c - a);
    double smin = kInf, smax = -kInf;
    for (size_t k = 0; k + 1 < samples.size(); ++k) {
        double dc = samples[k + 1].first - samples[k].first;
        if (dc <= 0.0) throw DomainError("beta_from_alpha: samples must be sorted in c");
        double slope = (samples[k + 1].second - samples[k].second) / dc;
        smin = std::min(smin, slope);
        smax = std::max(smax, slope);
    }
    if (extrapolated) *extrapolated = (rho0 < smin || rho0 > smax);
    return best;
}

double convexity_violation(const std::vector<std::pair<double, double>>& samples) {
    double worst = 0.0;
    for (size_t k = 1; k + 1 < samples.size(); ++k) {
        double x0 = samples[k - 1].first, x1 = samples[k].first, x2 = samples[k + 1].first;
        double t = (x1 - x0) / (x2 - x0);
        double interp = (1.0 - t) * samples[k - 1].second + t * samples[k + 1].second;
        worst = std::max(worst, samples[k].second - interp);
    }
    return worst;
}

std::vector<PseudographPoint> pseudograph(const Vector& u, double c, const FiniteSpace& space,
                                          double semiconcavity_tol) {
    if (!space.is_circle()) throw DomainError("pseudograph: circle grid required");
    const int n = space.n;
    if (u.size() != n) throw DomainError("pseudograph: size mismatch");
    std::vector<PseudographPoint> out(n);
    for (int i = 0; i < n; ++i) {
        int il = (i + n - 1) % n, ir = (i + 1) % n;
        double dl = space.coords[i] - space.coords[il];
        if (dl <= 0.0) dl += 1.0;
        double dr = space.coords[ir] - space.coords[i];
        if (dr <= 0.0) dr += 1.0;
        out[i].theta = space.coords[i];
        out[i].r_minus = c + (u(i) - u(il)) / dl;
        out[i].r_plus = c + (u(ir) - u(i)) / dr;
        if (out[i].r_plus > out[i].r_minus + semiconcavity_tol)
            throw NumericalError("pseudograph: semiconcavity violated at grid point " +
                                 std::to_string(i));
    }
    return out;
}

CrossingCount count_crossings(const Chain& a, const Chain& b, double tol) {
    if (a.theta_lift.size() != b.theta_lift.size())
        throw DomainError("count_crossings: chains must share the index range");
    const int m = static_cast<int>(a.theta_lift.size());
    // Events: a maximal run of coincidence counts once (a touch), and so
    // does a transversal sign change between adjacent non-coinciding
    // entries. A sign change across a coincidence run is part of that run.
    std::vector<std::pair<int, int>> events;  // [first, last] index of each event
    int prev_sign = 0;
    bool zero_since_sign = false;
    bool in_run = false;
    for (int k = 0; k < m; ++k) {
        double d = a.theta_lift[k] - b.theta_lift[k];
        int s = (std::abs(d) <= tol) ? 0 : (d > 0 ? 1 : -1);
        if (s == 0) {
            if (!in_run) events.emplace_back(k, k);
            else events.back().second = k;
            in_run = true;
            zero_since_sign = true;
        } else {
            in_run = false;
            if (prev_sign != 0 && s != prev_sign && !zero_since_sign) events.emplace_back(k - 1, k);
            prev_sign = s;
            zero_since_sign = false;
        }
    }
    CrossingCount cc;
    cc.total = static_cast<int>(events.size());
    if (!events.empty()) {
        cc.first_at_start = events.front().first == 0;
        cc.last_at_end = events.back().second == m - 1;
    }
    return cc;
}

}  // namespace weakkam
