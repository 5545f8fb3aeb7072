#include "weakkam/discounted.hpp"

#include <algorithm>
#include <cmath>

namespace weakkam {

namespace {

// Exact evaluation of u(x) = lambda u(p(x)) + cost(p(x), x) over the
// functional graph of the policy p: geometric sums around each cycle,
// then back-substitution along the trees hanging off it.
Vector evaluate_policy_min(const Matrix& c, const std::vector<int>& pred, double lambda) {
    const int n = static_cast<int>(c.rows());
    Vector u(n);
    std::vector<int> state(n, 0);  // 0 fresh, 1 on path, 2 done
    std::vector<int> path;
    for (int s = 0; s < n; ++s) {
        if (state[s] == 2) continue;
        path.clear();
        int x = s;
        while (state[x] == 0) {
            state[x] = 1;
            path.push_back(x);
            x = pred[x];
        }
        if (state[x] == 1) {
            // found a new cycle starting at x
            std::vector<int> cyc;
            size_t pos = path.size();
            while (pos > 0 && path[pos - 1] != x) --pos;
            for (size_t k = pos - 1; k < path.size(); ++k) cyc.push_back(path[k]);
            const int L = static_cast<int>(cyc.size());
            double sum = 0.0, lam_k = 1.0;
            for (int k = 0; k < L; ++k) {
                int a = cyc[k], b = cyc[(k + 1) % L];
                // u(a) = lambda u(b) + c(b, a): the walk follows pred
                sum += lam_k * c(b, a);
                lam_k *= lambda;
            }
            double denom = -std::expm1(static_cast<double>(L) * std::log1p(lambda - 1.0));
            u(cyc[0]) = sum / denom;
            state[cyc[0]] = 2;
            for (int k = L - 1; k >= 1; --k) {
                u(cyc[k]) = lambda * u(cyc[(k + 1) % L]) + c(cyc[(k + 1) % L], cyc[k]);
                state[cyc[k]] = 2;
            }
        }
        // back-substitute along the path until the part already done
        for (int k = static_cast<int>(path.size()) - 1; k >= 0; --k) {
            int v = path[k];
            if (state[v] == 2) continue;
            u(v) = lambda * u(pred[v]) + c(pred[v], v);
            state[v] = 2;
        }
    }
    return u;
}

}  // namespace

DiscountedSolve solve_u_lambda(const CostKernel& c, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("solve_u_lambda: lambda must be in (0,1)");
    const int n = c.size();
    const Matrix& m = c.entries();
    std::vector<int> pred(n, -1), next(n, -1);
    for (int x = 0; x < n; ++x) {
        double best = kInf;
        for (int y = 0; y < n; ++y)
            if (m(y, x) < best) {
                best = m(y, x);
                pred[x] = y;
            }
    }
    DiscountedSolve out;
    out.lambda = lambda;
    const int cap = 100 + 20 * n;
    for (int it = 0;; ++it) {
        if (it >= cap) throw NumericalError("solve_u_lambda: policy iteration cap reached");
        Vector u = evaluate_policy_min(m, pred, lambda);
        bool changed = false;
        for (int x = 0; x < n; ++x) {
            double best = kInf;
            int arg = -1;
            for (int y = 0; y < n; ++y) {
                double v = lambda * u(y) + m(y, x);
                if (v < best) {
                    best = v;
                    arg = y;
                }
            }
            next[x] = arg;
            if (arg != pred[x] && lambda * u(arg) + m(arg, x) < lambda * u(pred[x]) + m(pred[x], x) -
                                                                   1e-15 * (1.0 + std::abs(u(x))))
                changed = true;
        }
        if (!changed) {
            out.u = u;
            out.iterations = it + 1;
            break;
        }
        pred = next;
    }
    Vector t = apply_T_lambda(c, out.u, lambda);
    out.residual = (out.u - t).cwiseAbs().maxCoeff();
    double tol = 1e-12 * (1.0 + out.u.cwiseAbs().maxCoeff());
    if (out.residual > tol)
        throw NumericalError("solve_u_lambda: fixed-point residual " + std::to_string(out.residual));
    return out;
}

DiscountedSolve solve_v_lambda(const CostKernel& c, double lambda) {
    // T+ for c is -T- for the transposed cost applied to -f, so the dual
    // solve reduces to the primal one on the transpose.
    CostKernel ct(c.space(), c.entries().transpose(), c.periodic());
    DiscountedSolve s = solve_u_lambda(ct, lambda);
    s.u = -s.u;
    Vector t = apply_T_plus(c, lambda * s.u);
    s.residual = (s.u - t).cwiseAbs().maxCoeff();
    return s;
}

std::vector<double> lambda_to_one_schedule(int k_min, int k_max) {
    std::vector<double> v;
    for (int k = k_min; k <= k_max; ++k) v.push_back(1.0 - std::ldexp(1.0, -k));
    return v;
}

std::vector<double> lambda_to_zero_schedule(int k_min, int k_max) {
    std::vector<double> v;
    for (int k = k_min; k <= k_max; ++k) v.push_back(std::ldexp(1.0, -k));
    return v;
}

namespace {

CostKernel corrected(const CostKernel& c, double c0) {
    Matrix m = c.entries();
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i)
            if (std::isfinite(m(i, j))) m(i, j) += c0;
    return CostKernel(c.space(), std::move(m), c.periodic());
}

Vector discounted_limit(const CostKernel& c, double c0, std::vector<double> schedule,
                        double stop_tol, bool dual) {
    if (stop_tol <= 0.0) stop_tol = 10.0 * eps_aubry(c);
    if (schedule.empty()) schedule = lambda_to_one_schedule();
    for (size_t k = 0; k + 1 < schedule.size(); ++k)
        if (!(schedule[k] < schedule[k + 1]))
            throw DomainError("discounted limit: schedule must increase to 1");
    // On the corrected kernel c + c[0] the discounted solution equals
    // u_lambda + c[0]/(1-lambda) without cancellation.
    CostKernel ck = corrected(c, c0);
    Vector prev, cur;
    bool converged = false;
    for (double lambda : schedule) {
        cur = dual ? solve_v_lambda(ck, lambda).u : solve_u_lambda(ck, lambda).u;
        if (prev.size() && (cur - prev).cwiseAbs().maxCoeff() <= stop_tol) {
            converged = true;
            break;
        }
        prev = cur;
    }
    if (!converged) throw NumericalError("discounted limit: non-Cauchy tail along the schedule");
    Vector img = dual ? (apply_T_plus(c, cur).array() - c0).matrix().eval()
                      : (apply_T_minus(c, cur).array() + c0).matrix().eval();
    double res = (cur - img).cwiseAbs().maxCoeff();
    if (res > std::max(8.0 * stop_tol, 1e-8 * (1.0 + c.norm_inf())))
        throw NumericalError("discounted limit: result is not a weak KAM solution (residual " +
                             std::to_string(res) + ")");
    return cur;
}

}  // namespace

Vector limit_u1(const CostKernel& c, double c0, const std::vector<double>& schedule, double stop_tol) {
    return discounted_limit(c, c0, schedule, stop_tol, false);
}

Vector limit_v1(const CostKernel& c, double c0, const std::vector<double>& schedule, double stop_tol) {
    return discounted_limit(c, c0, schedule, stop_tol, true);
}

Vector formula_u1(const BarrierData& b, const MatherFamily& f, bool* upper_bound) {
    if (f.extremals.empty()) throw DomainError("formula_u1: empty extremal family");
    if (upper_bound) *upper_bound = f.capped;
    const int n = static_cast<int>(b.h.rows());
    Vector u(n);
    for (int x = 0; x < n; ++x) {
        double best = kInf;
        for (auto& cyc : f.cycles) {
            double s = 0.0;
            for (int y : cyc) s += b.h(y, x);
            best = std::min(best, s / static_cast<double>(cyc.size()));
        }
        u(x) = best;
    }
    return u;
}

Vector formula_v1(const BarrierData& b, const MatherFamily& f, bool* bound_flag) {
    if (f.extremals.empty()) throw DomainError("formula_v1: empty extremal family");
    if (bound_flag) *bound_flag = f.capped;
    const int n = static_cast<int>(b.h.rows());
    Vector v(n);
    for (int x = 0; x < n; ++x) {
        double best = -kInf;
        for (auto& cyc : f.cycles) {
            double s = 0.0;
            for (int y : cyc) s += -b.h(x, y);
            best = std::max(best, s / static_cast<double>(cyc.size()));
        }
        v(x) = best;
    }
    return v;
}

ConjugateReport conjugate_pair_test(const Vector& u1, const Vector& v1, const BarrierData& b,
                                    const AubryData& a, const MatherFamily& f, double tol) {
    ConjugateReport r;
    r.tol = (tol > 0.0) ? tol : std::max(1e3 * b.eps, 1e-6);
    double worst_eq = 0.0;
    for (int x : a.projected) worst_eq = std::max(worst_eq, std::abs(u1(x) - v1(x)));
    r.eq_on_aubry = worst_eq <= r.tol;
    r.ordered = (u1 - v1).minCoeff() >= -r.tol;
    auto averages_zero = [&](const Vector& w) {
        for (auto& cyc : f.cycles) {
            double s = 0.0;
            for (int y : cyc) s += w(y);
            if (std::abs(s / static_cast<double>(cyc.size())) > r.tol) return false;
        }
        return true;
    };
    r.u1_averages_zero = averages_zero(u1);
    r.v1_averages_zero = averages_zero(v1);
    return r;
}

void DegenerateWeight::validate(const MatherFamily& f, double eps_A) const {
    for (int i = 0; i < alpha.size(); ++i)
        if (!(alpha(i) >= 0.0 && alpha(i) < 1.0))
            throw DomainError("DegenerateWeight: alpha must take values in [0,1)");
    for (auto& cyc : f.cycles) {
        double s = 0.0;
        for (int y : cyc) s += alpha(y);
        if (!(s / static_cast<double>(cyc.size()) > eps_A))
            throw DomainError("DegenerateWeight: alpha-average vanishes on a Mather measure");
    }
}

std::pair<Vector, Vector> degenerate_seeds(const BarrierData& b, const MatherFamily& f) {
    Vector u1 = formula_u1(b, f);
    Vector lo = u1.array() - u1.maxCoeff();
    Vector hi = u1.array() - u1.minCoeff();
    return {lo, hi};
}

DegenerateSolve solve_u_lambda_alpha(const CostKernel& c, double c0, const DegenerateWeight& w,
                                     double lambda, const Vector& seed_lo, const Vector& seed_hi,
                                     double gap_tol, long max_iter) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw DomainError("solve_u_lambda_alpha: lambda must be in (0,1)");
    if (gap_tol <= 0.0) gap_tol = 1e-9 * (1.0 + c.norm_inf());
    const double slack = 1e-12 * (1.0 + c.norm_inf());
    Vector lo = seed_lo, hi = seed_hi;
    if ((hi - lo).minCoeff() < -slack)
        throw DomainError("solve_u_lambda_alpha: seeds are not ordered");
    Vector damp_lo(lo.size()), damp_hi(hi.size());
    DegenerateSolve out;
    auto step = [&](const Vector& v, Vector& damp) {
        for (int i = 0; i < v.size(); ++i) damp(i) = (1.0 - lambda * w.alpha(i)) * v(i);
        return (apply_T_minus(c, damp).array() + c0).matrix().eval();
    };
    for (long it = 0; it < max_iter; ++it) {
        Vector lo2 = step(lo, damp_lo);
        Vector hi2 = step(hi, damp_hi);
        if ((lo2 - lo).minCoeff() < -slack * 100)
            throw NumericalError("solve_u_lambda_alpha: non-monotone lower iteration (bad seed or c[0])");
        if ((hi2 - hi).maxCoeff() > slack * 100)
            throw NumericalError("solve_u_lambda_alpha: non-monotone upper iteration (bad seed or c[0])");
        lo = std::move(lo2);
        hi = std::move(hi2);
        out.iterations = it + 1;
        out.gap = (hi - lo).cwiseAbs().maxCoeff();
        if (out.gap <= gap_tol) {
            out.u = 0.5 * (lo + hi);
            return out;
        }
    }
    throw NumericalError("solve_u_lambda_alpha: monotone limits did not meet within the budget (gap " +
                         std::to_string(out.gap) + ")");
}

Vector limit_u0_alpha(const CostKernel& c, double c0, const DegenerateWeight& w,
                      const BarrierData& b, const MatherFamily& f,
                      const std::vector<double>& schedule_in, double stop_tol, double gap_tol) {
    if (stop_tol <= 0.0) stop_tol = 10.0 * eps_aubry(c);
    if (gap_tol <= 0.0) gap_tol = stop_tol / 8.0;
    std::vector<double> schedule = schedule_in;
    if (schedule.empty()) schedule = lambda_to_zero_schedule();
    for (size_t k = 0; k + 1 < schedule.size(); ++k)
        if (!(schedule[k] > schedule[k + 1]))
            throw DomainError("limit_u0_alpha: schedule must decrease to 0");
    auto [lo_seed, hi_seed] = degenerate_seeds(b, f);
    Vector prev, cur;
    for (double lambda : schedule) {
        cur = solve_u_lambda_alpha(c, c0, w, lambda, lo_seed, hi_seed, gap_tol).u;
        if (prev.size() && (cur - prev).cwiseAbs().maxCoeff() <= stop_tol) return cur;
        prev = cur;
    }
    throw NumericalError("limit_u0_alpha: non-Cauchy tail along the schedule");
}

Vector formula_u0_alpha(const BarrierData& b, const MatherFamily& f, const Vector& alpha) {
    if (f.extremals.empty()) throw DomainError("formula_u0_alpha: empty extremal family");
    const int n = static_cast<int>(b.h.rows());
    Vector u(n);
    for (int x = 0; x < n; ++x) {
        double best = kInf;
        for (auto& cyc : f.cycles) {
            double num = 0.0, den = 0.0;
            for (int y : cyc) {
                num += alpha(y) * b.h(y, x);
                den += alpha(y);
            }
            if (den <= 0.0)
                throw NumericalError("formula_u0_alpha: vanishing alpha-average ((alpha2) violated)");
            best = std::min(best, num / den);
        }
        u(x) = best;
    }
    return u;
}

double degenerate_chain_monitor(const CostKernel& c, double c0, const DegenerateWeight& w,
                                double lambda, const Vector& u, int x0, int steps, double bound) {
    const int n = c.size();
    if (x0 < 0 || x0 >= n) throw DomainError("degenerate_chain_monitor: bad base point");
    int x = x0;
    double beta = 1.0;       // beta_0
    double partial = lambda; // lambda * beta_0
    for (int k = 0; k < steps; ++k) {
        int arg = -1;
        double best = kInf;
        for (int y = 0; y < n; ++y) {
            double v = (1.0 - lambda * w.alpha(y)) * u(y) + c(y, x);
            if (v < best) {
                best = v;
                arg = y;
            }
        }
        x = arg;
        beta *= (1.0 - lambda * w.alpha(x));
        partial += lambda * beta;
        if (partial >= bound)
            throw NumericalError("degenerate_chain_monitor: partial sums exceed the configured bound");
    }
    return partial;
}

TriangleMap::TriangleMap(double alpha, double eps0) : alpha_(alpha), eps0_(eps0) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("TriangleMap: alpha must be in (0,1)");
    if (!(eps0 >= 0.0)) throw DomainError("TriangleMap: eps0 must be nonnegative");
    // f maps the triangle into itself iff |eps(y)| <= (1-alpha)(y + 1/2);
    // check it by sampling, and record the sampled Lipschitz constant of
    // eps (the fixed-point iteration contracts for the weighted 1-norm
    // |x| + W|y| with W = max(1, Lip/(1-alpha))).
    const int samples = 4096;
    double lip = 0.0;
    double py = -0.5, pe = epsilon(-0.5);
    for (int k = 1; k <= samples; ++k) {
        double y = -0.5 + static_cast<double>(k) / samples;
        double e = epsilon(y);
        if (std::abs(e) > (1.0 - alpha_) * (y + 0.5) + 1e-12)
            throw DomainError("TriangleMap: eps0 too large, the map leaves the triangle");
        lip = std::max(lip, std::abs(e - pe) / (y - py));
        py = y;
        pe = e;
    }
    lip_eps_ = lip;
}

double TriangleMap::epsilon(double y) const {
    if (y > 0.0) y = 0.0;
    if (y < -0.5) y = -0.5;
    // g^{-1}(mu) = 2mu / (alpha - 1 + 2 alpha mu), then
    // h(t) = (1-t) sin(ln(1-t)) extended by h(1) = 0.
    double t = 2.0 * y / (alpha_ - 1.0 + 2.0 * alpha_ * y);
    double om = 1.0 - t;
    if (om <= 0.0) return 0.0;
    return eps0_ * om * std::sin(std::log(om));
}

std::pair<double, double> TriangleMap::map(double x, double y) const {
    return {x + epsilon(y), alpha_ * (y + 0.5) - 0.5};
}

bool TriangleMap::inside(double x, double y, double slack) const {
    return y >= -0.5 - slack && y <= 0.5 - std::abs(x) + slack;
}

std::pair<double, double> TriangleMap::closed_form(double lambda) const {
    double xl = eps0_ * std::sin(std::log(1.0 - lambda));
    double yl = (alpha_ - 1.0) / (2.0 * (1.0 - alpha_ * lambda));
    return {xl, yl};
}

std::vector<TriangleFixedPoint> triangle_fixed_points(const TriangleMap& t,
                                                      const std::vector<double>& schedule) {
    std::vector<TriangleFixedPoint> out;
    out.reserve(schedule.size());
    for (double lambda : schedule) {
        if (!(lambda > 0.0 && lambda < 1.0))
            throw DomainError("triangle_fixed_points: lambda must be in (0,1)");
        TriangleFixedPoint fp;
        fp.lambda = lambda;
        double x = 0.0, y = 0.0;
        const long cap = 400 + static_cast<long>(60.0 / std::max(1e-12, -std::log(lambda)));
        long it = 0;
        for (; it < cap; ++it) {
            auto [nx, ny] = t.map(lambda * x, lambda * y);
            if (!t.inside(nx, ny, 1e-9))
                throw NumericalError("triangle_fixed_points: iteration left the triangle");
            double step = std::abs(nx - x) + std::abs(ny - y);
            x = nx;
            y = ny;
            if (step <= 1e-14) break;
        }
        fp.iterations = it;
        fp.x_iter = x;
        fp.y_iter = y;
        auto [xc, yc] = t.closed_form(lambda);
        fp.x_closed = xc;
        fp.y_closed = yc;
        fp.mismatch = std::abs(x - xc) + std::abs(y - yc);
        out.push_back(fp);
    }
    return out;
}

}  // namespace weakkam
