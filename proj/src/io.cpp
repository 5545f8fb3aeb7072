#include "weakkam/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace weakkam {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw DomainError(where + ": object expected");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw DomainError(where + ": unknown key '" + it.key() + "'");
}

double number_or_inf(const json& v, const std::string& where) {
    if (v.is_string()) {
        if (v.get<std::string>() == "inf") return kInf;
        throw DomainError(where + ": only the string 'inf' is accepted");
    }
    if (!v.is_number()) throw DomainError(where + ": number expected");
    return v.get<double>();
}

std::function<double(double, double)> circle_function(const json& j) {
    check_keys(j, "instance.function", {"kind", "value"});
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "sqdist")
        return [](double x, double y) {
            double d = lift_min_modulus(y - x);
            return d * d;
        };
    if (kind == "constant") {
        double v = j.at("value").get<double>();
        return [v](double, double) { return v; };
    }
    throw DomainError("instance.function: unknown kind '" + kind + "'");
}

std::function<double(double)> potential_function(const json& j) {
    check_keys(j, "instance.potential", {"kind", "x2", "scale"});
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return [](double) { return 0.0; };
    if (kind == "double_well") {
        double x2 = j.value("x2", 0.3);
        double scale = j.value("scale", 1.0);
        return [x2, scale](double x) {
            double a = std::sin(M_PI * x);
            double b = std::sin(M_PI * (x - x2));
            return -scale * a * a * b * b;
        };
    }
    throw DomainError("instance.potential: unknown kind '" + kind + "'");
}

}  // namespace

CostKernel instance_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type")) throw DomainError("instance: 'type' required");
    std::string type = j.at("type").get<std::string>();
    if (type == "dense") {
        check_keys(j, "instance", {"type", "n", "entries"});
        int n = j.at("n").get<int>();
        const json& e = j.at("entries");
        if (!e.is_array() || static_cast<int>(e.size()) != n)
            throw DomainError("instance: entries must be an n x n array");
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) {
            if (!e[i].is_array() || static_cast<int>(e[i].size()) != n)
                throw DomainError("instance: entries must be an n x n array");
            for (int k = 0; k < n; ++k) m(i, k) = number_or_inf(e[i][k], "instance.entries");
        }
        return build_dense_cost(n, m);
    }
    if (type == "circle") {
        check_keys(j, "instance", {"type", "grid_n", "function", "window"});
        std::optional<int> window;
        if (j.contains("window")) window = j.at("window").get<int>();
        return build_circle_cost(j.at("grid_n").get<int>(), circle_function(j.at("function")), window);
    }
    if (type == "action") {
        check_keys(j, "instance", {"type", "grid_n", "steps_m", "potential", "cohomology_c"});
        ActionDiscretization a;
        a.grid_n = j.at("grid_n").get<int>();
        a.steps_m = j.at("steps_m").get<int>();
        a.potential = potential_function(j.at("potential"));
        a.cohomology_c = j.value("cohomology_c", 0.0);
        return build_action_cost(a);
    }
    throw DomainError("instance: unknown type '" + type + "'");
}

RunConfig load_config(const std::filesystem::path& path, const std::string& command,
                      const std::string& out_override) {
    std::ifstream in(path);
    if (!in) throw DomainError("config: cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DomainError(std::string("config: malformed JSON: ") + e.what());
    }
    check_keys(j, "config",
               {"command", "instance", "out_dir", "tolerances", "schedules", "degenerate", "twist",
                "triangle", "mather"});
    if (j.contains("command") && j.at("command").get<std::string>() != command)
        throw DomainError("config: command mismatch between file and argument");
    if (j.contains("tolerances"))
        check_keys(j.at("tolerances"), "config.tolerances",
                   {"eps_aubry", "stop_tol", "conjugate_tol", "route_tol", "semiconcavity_tol",
                    "calib_tol"});
    if (j.contains("schedules"))
        check_keys(j.at("schedules"), "config.schedules", {"lambda_to_one", "lambda_to_zero"});
    RunConfig c;
    c.command = command;
    c.spec = j;
    if (!out_override.empty()) c.out_dir = out_override;
    else if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    else c.out_dir = "out";
    return c;
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw DomainError("write_csv: cannot open " + path.string());
    for (size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << "\n";
    for (auto& r : rows) {
        for (size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << format_value(r[k]);
        out << "\n";
    }
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw DomainError("write_matrix_csv: cannot open " + path.string());
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j)
            out << (j ? "," : "") << (std::isfinite(m(i, j)) ? format_value(m(i, j)) : "inf");
        out << "\n";
    }
}

json RunReport::to_json() const {
    json j;
    j["command"] = command;
    j["scalars"] = scalars;
    j["files"] = files;
    j["checks"] = checks;
    j["wall_clock_s"] = wall_clock_s;
    return j;
}

namespace {

struct Emitter {
    std::filesystem::path dir;
    bool enabled;
    RunReport* report;

    void matrix(const std::string& name, const Matrix& m) {
        if (!enabled) return;
        write_matrix_csv(dir / name, m);
        report->files.push_back(name);
    }
    void csv(const std::string& name, const std::vector<std::string>& header,
             const std::vector<std::vector<double>>& rows) {
        if (!enabled) return;
        write_csv(dir / name, header, rows);
        report->files.push_back(name);
    }
    void text(const std::string& name, const std::string& body) {
        if (!enabled) return;
        std::ofstream out(dir / name);
        out << body;
        report->files.push_back(name);
    }
};

double tolerance(const json& cfg, const std::string& key, double fallback) {
    if (cfg.contains("tolerances") && cfg.at("tolerances").contains(key))
        return cfg.at("tolerances").at(key).get<double>();
    return fallback;
}

std::vector<double> schedule_from(const json& cfg, const std::string& key,
                                  std::vector<double> fallback) {
    if (cfg.contains("schedules") && cfg.at("schedules").contains(key))
        return cfg.at("schedules").at(key).get<std::vector<double>>();
    return fallback;
}

void run_solve(const RunConfig& cfg, Emitter& em, RunReport& rep) {
    CostKernel kernel = instance_from_json(cfg.spec.at("instance"));
    const double scale = 1.0 + kernel.norm_inf();
    CriticalValue karp = critical_value_karp(kernel);
    rep.scalars["c0"] = karp.value;
    if (kernel.size() <= 64) {
        CriticalValue disc = critical_value_discounted(kernel, lambda_to_one_schedule(4, 24));
        rep.scalars["c0_discounted"] = disc.value;
        rep.checks["critical_value_cross_method"] = std::abs(disc.value - karp.value) <= 1e-6 * scale;
    }
    BarrierData b = peierls_barrier(kernel, karp.value);
    rep.scalars["barrier_tail_start"] = b.tail_start;
    rep.scalars["barrier_period"] = b.period;
    rep.checks["barrier_periodic"] = !b.fallback;
    double diag_min = 0.0;
    for (int x = 0; x < kernel.size(); ++x) diag_min = std::min(diag_min, b.h(x, x));
    rep.checks["barrier_diagonal_nonnegative"] = diag_min >= -10.0 * b.eps;
    bool triangle_ok = true;
    if (kernel.size() <= 256) {
        for (int x = 0; x < kernel.size() && triangle_ok; ++x)
            for (int y = 0; y < kernel.size() && triangle_ok; ++y)
                for (int z = 0; z < kernel.size(); ++z)
                    if (b.h(x, y) > b.h(x, z) + b.h(z, y) + 100.0 * b.eps) {
                        triangle_ok = false;
                        break;
                    }
        rep.checks["barrier_triangle_inequality"] = triangle_ok;
    }
    double eps_A = tolerance(cfg.spec, "eps_aubry", eps_aubry(kernel));
    AubryData a = aubry_sets(kernel, b, eps_A);
    rep.scalars["aubry_points"] = static_cast<double>(a.projected.size());
    rep.scalars["aubry_pairs"] = static_cast<double>(a.pairs.size());
    double residual = 0.0;
    Vector u = weak_kam_from_barrier(kernel, b, a.projected.front(), false, &residual);
    rep.scalars["weak_kam_residual"] = residual;
    rep.checks["weak_kam_fixed_point"] = residual <= std::max(100.0 * b.eps, 1e-8 * scale);
    SubsolutionCheck sc = is_subsolution(kernel, u, karp.value);
    rep.checks["weak_kam_is_subsolution"] = sc.ok;

    em.matrix("barrier.csv", b.h);
    std::vector<std::vector<double>> urows;
    for (int x = 0; x < kernel.size(); ++x)
        urows.push_back({static_cast<double>(x), u(x)});
    em.csv("weak_kam.csv", {"index", "u"}, urows);
    json aj;
    aj["projected"] = a.projected;
    json prs = json::array();
    for (auto& [x, y] : a.pairs) prs.push_back({x, y});
    aj["pairs"] = prs;
    aj["tolerance"] = a.tolerance;
    em.text("aubry.json", aj.dump(2) + "\n");
}

void run_mather(const RunConfig& cfg, Emitter& em, RunReport& rep) {
    CostKernel kernel = instance_from_json(cfg.spec.at("instance"));
    int lp_cap = 60, cycle_cap = 100000;
    if (cfg.spec.contains("mather")) {
        check_keys(cfg.spec.at("mather"), "config.mather", {"lp_cap", "cycle_cap"});
        lp_cap = cfg.spec.at("mather").value("lp_cap", 60);
        cycle_cap = cfg.spec.at("mather").value("cycle_cap", 100000);
    }
    CriticalValue karp = critical_value_karp(kernel);
    rep.scalars["c0"] = karp.value;
    BarrierData b = peierls_barrier(kernel, karp.value);
    double eps_A = tolerance(cfg.spec, "eps_aubry", eps_aubry(kernel));
    AubryData a = aubry_sets(kernel, b, eps_A);
    MatherFamily fam = extremal_measures(kernel, a, cycle_cap);
    rep.scalars["extremal_count"] = static_cast<double>(fam.extremals.size());
    rep.checks["extremal_family_complete"] = !fam.capped;
    bool closed_ok = true, support_ok = true, objective_ok = true;
    std::set<std::pair<int, int>> aub(a.pairs.begin(), a.pairs.end());
    for (auto& mu : fam.extremals) {
        closed_ok = closed_ok && mu.marginal_residual() <= 1e-10 && std::abs(mu.mass() - 1.0) <= 1e-12;
        for (auto& [i, j, w] : mu.weights) support_ok = support_ok && aub.count({i, j}) > 0;
        objective_ok = objective_ok && std::abs(mu.cost_integral(kernel) + karp.value) <= 1e-8 * (1.0 + kernel.norm_inf());
    }
    rep.checks["extremals_closed"] = closed_ok;
    rep.checks["extremals_supported_in_2aubry"] = support_ok;
    rep.checks["extremals_minimizing"] = objective_ok;
    MatherSet ms = mather_set(fam);
    rep.scalars["mather_points"] = static_cast<double>(ms.projected.size());
    std::set<int> aubp(a.projected.begin(), a.projected.end());
    bool subset = true;
    for (int x : ms.projected) subset = subset && aubp.count(x) > 0;
    rep.checks["mather_subset_of_aubry"] = subset;
    if (kernel.size() <= lp_cap) {
        LpResult lp = lp_min_cost(kernel, lp_cap);
        rep.scalars["lp_value"] = lp.value;
        rep.checks["lp_matches_karp"] = std::abs(lp.value + karp.value) <= 1e-8 * (1.0 + kernel.norm_inf());
    }
    if (kernel.space().is_circle() && kernel.has_displacement() && !fam.extremals.empty())
        rep.scalars["rotation_number"] = rotation_number_of_measure(kernel, fam.extremals.front());

    std::vector<std::vector<double>> rows;
    for (size_t k = 0; k < fam.extremals.size(); ++k)
        for (auto& [i, j, w] : fam.extremals[k].weights)
            rows.push_back({static_cast<double>(k), static_cast<double>(i), static_cast<double>(j), w});
    em.csv("measures.csv", {"measure", "i", "j", "weight"}, rows);
    json mj;
    mj["projected"] = ms.projected;
    json prs = json::array();
    for (auto& [x, y] : ms.pairs) prs.push_back({x, y});
    mj["pairs"] = prs;
    em.text("mather.json", mj.dump(2) + "\n");
}

void run_discounted(const RunConfig& cfg, Emitter& em, RunReport& rep) {
    CostKernel kernel = instance_from_json(cfg.spec.at("instance"));
    const double scale = 1.0 + kernel.norm_inf();
    CriticalValue karp = critical_value_karp(kernel);
    rep.scalars["c0"] = karp.value;
    BarrierData b = peierls_barrier(kernel, karp.value);
    AubryData a = aubry_sets(kernel, b, tolerance(cfg.spec, "eps_aubry", eps_aubry(kernel)));
    MatherFamily fam = extremal_measures(kernel, a);
    std::vector<double> sched = schedule_from(cfg.spec, "lambda_to_one", lambda_to_one_schedule());
    double stop_tol = tolerance(cfg.spec, "stop_tol", 1e-6 * scale);
    Vector u1 = limit_u1(kernel, karp.value, sched, stop_tol);
    Vector v1 = limit_v1(kernel, karp.value, sched, stop_tol);
    Vector fu1 = formula_u1(b, fam);
    Vector fv1 = formula_v1(b, fam);
    double route_tol = tolerance(cfg.spec, "route_tol", 5e-6 * scale);
    rep.scalars["u1_route_gap"] = (u1 - fu1).cwiseAbs().maxCoeff();
    rep.scalars["v1_route_gap"] = (v1 - fv1).cwiseAbs().maxCoeff();
    rep.checks["u1_routes_agree"] = rep.scalars["u1_route_gap"] <= route_tol;
    rep.checks["v1_routes_agree"] = rep.scalars["v1_route_gap"] <= route_tol;
    double worst_avg = -kInf, best_avg = kInf;
    for (auto& cyc : fam.cycles) {
        double s = 0.0;
        for (int y : cyc) s += u1(y);
        s /= static_cast<double>(cyc.size());
        worst_avg = std::max(worst_avg, s);
        best_avg = std::min(best_avg, std::abs(s));
    }
    rep.checks["u1_member_of_F"] = worst_avg <= 1e-6 * scale;
    rep.checks["u1_attains_zero_average"] = best_avg <= 1e-6 * scale;
    ConjugateReport cr = conjugate_pair_test(u1, v1, b, a, fam,
                                             tolerance(cfg.spec, "conjugate_tol", 0.0));
    rep.checks["conjugate_conditions_consistent"] = cr.consistent();
    rep.scalars["conjugate_pair"] = cr.conjugate() ? 1.0 : 0.0;

    std::vector<std::vector<double>> curve;
    for (double lambda : sched) {
        DiscountedSolve s = solve_u_lambda(kernel, lambda);
        std::vector<double> row{lambda};
        for (int x = 0; x < kernel.size(); ++x) row.push_back(s.u(x));
        curve.push_back(row);
    }
    std::vector<std::string> header{"lambda"};
    for (int x = 0; x < kernel.size(); ++x) header.push_back("u" + std::to_string(x));
    em.csv("u_lambda.csv", header, curve);
    std::vector<std::vector<double>> rows;
    for (int x = 0; x < kernel.size(); ++x)
        rows.push_back({static_cast<double>(x), u1(x), fu1(x), v1(x), fv1(x)});
    em.csv("u1_v1.csv", {"index", "u1_limit", "u1_formula", "v1_limit", "v1_formula"}, rows);
}

void run_degenerate(const RunConfig& cfg, Emitter& em, RunReport& rep) {
    CostKernel kernel = instance_from_json(cfg.spec.at("instance"));
    const double scale = 1.0 + kernel.norm_inf();
    CriticalValue karp = critical_value_karp(kernel);
    rep.scalars["c0"] = karp.value;
    BarrierData b = peierls_barrier(kernel, karp.value);
    AubryData a = aubry_sets(kernel, b, tolerance(cfg.spec, "eps_aubry", eps_aubry(kernel)));
    MatherFamily fam = extremal_measures(kernel, a);
    if (!cfg.spec.contains("degenerate"))
        throw DomainError("config: 'degenerate' block required for this command");
    const json& dj = cfg.spec.at("degenerate");
    check_keys(dj, "config.degenerate", {"alpha", "bound"});
    DegenerateWeight w;
    if (dj.at("alpha").is_array()) {
        auto vals = dj.at("alpha").get<std::vector<double>>();
        if (static_cast<int>(vals.size()) != kernel.size())
            throw DomainError("config.degenerate: alpha length mismatch");
        w.alpha = Eigen::Map<Vector>(vals.data(), vals.size());
    } else {
        double v = dj.at("alpha").get<double>();
        w.alpha = Vector::Constant(kernel.size(), v);
    }
    w.validate(fam, eps_aubry(kernel));
    auto [lo, hi] = degenerate_seeds(b, fam);
    std::vector<double> sched = schedule_from(cfg.spec, "lambda_to_zero", lambda_to_zero_schedule());
    std::vector<std::vector<double>> curve;
    for (double lambda : {0.5, 0.25, 0.125}) {
        DegenerateSolve s = solve_u_lambda_alpha(kernel, karp.value, w, lambda, lo, hi);
        std::vector<double> row{lambda, s.gap};
        for (int x = 0; x < kernel.size(); ++x) row.push_back(s.u(x));
        curve.push_back(row);
        rep.checks["sandwich_gap_lambda_" + format_value(lambda)] = s.gap <= 1e-9 * scale;
        double m = degenerate_chain_monitor(kernel, karp.value, w, lambda, s.u, 0, 200,
                                            dj.value("bound", 50.0));
        rep.scalars["monitor_lambda_" + format_value(lambda)] = m;
    }
    double stop_tol = tolerance(cfg.spec, "stop_tol", 1e-5 * scale);
    Vector u0 = limit_u0_alpha(kernel, karp.value, w, b, fam, sched, stop_tol);
    Vector f0 = formula_u0_alpha(b, fam, w.alpha);
    rep.scalars["u0_route_gap"] = (u0 - f0).cwiseAbs().maxCoeff();
    rep.checks["u0_routes_agree"] =
        rep.scalars["u0_route_gap"] <= tolerance(cfg.spec, "route_tol", 5e-6 * scale);
    std::vector<std::string> header{"lambda", "gap"};
    for (int x = 0; x < kernel.size(); ++x) header.push_back("u" + std::to_string(x));
    em.csv("u_lambda_alpha.csv", header, curve);
    std::vector<std::vector<double>> rows;
    for (int x = 0; x < kernel.size(); ++x)
        rows.push_back({static_cast<double>(x), u0(x), f0(x)});
    em.csv("u0_alpha.csv", {"index", "u0_limit", "u0_formula"}, rows);
}

void run_twist(const RunConfig& cfg, Emitter& em, RunReport& rep) {
    if (!cfg.spec.contains("twist")) throw DomainError("config: 'twist' block required");
    const json& tj = cfg.spec.at("twist");
    check_keys(tj, "config.twist",
               {"family", "eps", "grid_n", "K", "c_grid", "horizon", "rho_grid", "pseudograph_c"});
    std::string family = tj.value("family", "integrable");
    GeneratingFunction g = (family == "integrable") ? make_generating_integrable()
                           : (family == "standard")
                               ? make_generating_standard(tj.value("eps", 0.0))
                               : throw DomainError("config.twist: unknown family");
    int grid_n = tj.value("grid_n", 512);
    int K = tj.value("K", 0);
    int horizon = tj.value("horizon", 400);
    std::vector<double> c_grid = tj.value("c_grid", std::vector<double>{});
    if (c_grid.empty())
        for (int k = 0; k <= 9; ++k) c_grid.push_back(0.1 * k);
    std::vector<std::pair<double, double>> alpha_samples;
    std::vector<std::vector<double>> rows;
    double prev_rho = -kInf;
    bool rho_monotone = true;
    for (double c : c_grid) {
        double ac = alpha_of_c(g, c, grid_n, K);
        double rho = rotation_number(g, c, grid_n, K, horizon);
        alpha_samples.emplace_back(c, ac);
        rows.push_back({c, ac, rho});
        if (rho < prev_rho - 2.0 / grid_n) rho_monotone = false;
        prev_rho = rho;
    }
    rep.checks["rho_monotone"] = rho_monotone;
    rep.checks["alpha_convex"] = convexity_violation(alpha_samples) <= 4.0 / grid_n;
    em.csv("alpha_rho.csv", {"c", "alpha", "rho"}, rows);

    std::vector<double> rho_grid = tj.value("rho_grid", std::vector<double>{});
    if (rho_grid.empty()) {
        double lo = alpha_samples.size() > 1 ? rows.front()[2] : 0.0;
        double hi = alpha_samples.size() > 1 ? rows.back()[2] : 1.0;
        for (int k = 0; k <= 16; ++k) rho_grid.push_back(lo + (hi - lo) * k / 16.0);
    }
    std::vector<std::pair<double, double>> beta_samples;
    std::vector<std::vector<double>> brows;
    for (double r : rho_grid) {
        bool extra = false;
        double bv = beta_from_alpha(alpha_samples, r, &extra);
        beta_samples.emplace_back(r, bv);
        brows.push_back({r, bv, extra ? 1.0 : 0.0});
    }
    rep.checks["beta_convex"] = convexity_violation(beta_samples) <= 1e-12;
    em.csv("beta.csv", {"rho", "beta", "extrapolated"}, brows);

    double pc = tj.value("pseudograph_c", c_grid.back());
    TwistCost tc = twist_cost(g, pc, grid_n, K);
    double ac = critical_value_karp(tc.kernel).value;
    Vector u = peierls_row(tc.kernel, ac, 0);
    double sc_tol = tolerance(cfg.spec, "semiconcavity_tol", 64.0 / grid_n);
    auto pg = pseudograph(u, pc, tc.kernel.space(), sc_tol);
    rep.checks["pseudograph_semiconcave"] = true;  // pseudograph throws on violation
    std::vector<std::vector<double>> prow;
    for (auto& p : pg) prow.push_back({p.theta, p.r_minus, p.r_plus});
    em.csv("pseudograph.csv", {"theta", "r_minus", "r_plus"}, prow);
}

void run_triangle(const RunConfig& cfg, Emitter& em, RunReport& rep) {
    double alpha = 0.75, eps0 = 0.1;
    std::vector<double> sched;
    if (cfg.spec.contains("triangle")) {
        const json& tj = cfg.spec.at("triangle");
        check_keys(tj, "config.triangle", {"alpha", "eps0", "schedule"});
        alpha = tj.value("alpha", 0.75);
        eps0 = tj.value("eps0", 0.1);
        sched = tj.value("schedule", std::vector<double>{});
    }
    if (sched.empty()) {
        constexpr double kPi = 3.14159265358979323846;
        for (int k = 0; k < 20; ++k) {
            double t = kPi / 2.0 + kPi * k / 19.0;
            sched.push_back(1.0 - std::exp(-t));
        }
    }
    TriangleMap t(alpha, eps0);
    auto fps = triangle_fixed_points(t, sched);
    double worst = 0.0, xmin = kInf, xmax = -kInf;
    std::vector<std::vector<double>> rows;
    for (auto& fp : fps) {
        worst = std::max(worst, fp.mismatch);
        xmin = std::min(xmin, fp.x_iter);
        xmax = std::max(xmax, fp.x_iter);
        rows.push_back({fp.lambda, fp.x_iter, fp.y_iter, fp.x_closed, fp.y_closed, fp.mismatch});
    }
    rep.scalars["worst_mismatch"] = worst;
    rep.scalars["x_min"] = xmin;
    rep.scalars["x_max"] = xmax;
    rep.checks["closed_form_matches_iteration"] = worst <= 1e-9;
    rep.checks["x_attains_minus_eps0"] = xmin <= -eps0 + 1e-6;
    rep.checks["x_attains_plus_eps0"] = xmax >= eps0 - 1e-6;
    em.csv("triangle.csv", {"lambda", "x_iter", "y_iter", "x_closed", "y_closed", "mismatch"}, rows);
}

}  // namespace

RunReport run(const RunConfig& config, bool check_only) {
    auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    rep.command = config.command;
    Emitter em{config.out_dir, !check_only, &rep};
    if (!check_only) std::filesystem::create_directories(config.out_dir);

    if (config.command == "solve") run_solve(config, em, rep);
    else if (config.command == "mather") run_mather(config, em, rep);
    else if (config.command == "discounted") run_discounted(config, em, rep);
    else if (config.command == "degenerate") run_degenerate(config, em, rep);
    else if (config.command == "twist") run_twist(config, em, rep);
    else if (config.command == "triangle") run_triangle(config, em, rep);
    else throw DomainError("run: unknown command '" + config.command + "'");

    rep.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!check_only) {
        std::ofstream out(config.out_dir / "report.json");
        out << rep.to_json().dump(2) << "\n";
        rep.files.push_back("report.json");
    }
    return rep;
}

}  // namespace weakkam
