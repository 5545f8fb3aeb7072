#include "weakkam/mather.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace weakkam {

ClosedMeasure cycle_measure(int n, const std::vector<int>& cycle) {
    if (cycle.empty()) throw DomainError("cycle_measure: empty cycle");
    ClosedMeasure mu;
    mu.n = n;
    const double w = 1.0 / static_cast<double>(cycle.size());
    std::map<std::pair<int, int>, double> acc;
    for (size_t k = 0; k < cycle.size(); ++k)
        acc[{cycle[k], cycle[(k + 1) % cycle.size()]}] += w;
    for (auto& [e, v] : acc) mu.weights.emplace_back(e.first, e.second, v);
    mu.validate();
    return mu;
}

namespace {

// Dense two-phase simplex, Bland's rule on both the entering and the
// leaving choice. Columns: structural variables first, then artificials.
struct Simplex {
    int m = 0, nvar = 0;
    Matrix T;              // m x (nvar + 1), last column is the rhs
    std::vector<int> basis;
    int iterations = 0;

    static constexpr double kPivTol = 1e-11;

    // returns false when optimal for the given costs
    bool pivot_step(const Vector& cost, int limit_cols) {
        // reduced costs via basis multipliers: y^T B = c_B
        Vector cb(m);
        for (int r = 0; r < m; ++r) cb(r) = cost(basis[r]);
        // T rows are already the current dictionary (B^{-1} A), so the
        // reduced cost of column j is c_j - cb . T(:,j).
        int enter = -1;
        for (int j = 0; j < limit_cols; ++j) {
            bool in_basis = false;
            for (int r = 0; r < m; ++r)
                if (basis[r] == j) { in_basis = true; break; }
            if (in_basis) continue;
            double red = cost(j) - cb.dot(T.col(j));
            if (red < -1e-9) { enter = j; break; }  // Bland: first improving index
        }
        if (enter < 0) return false;
        int leave = -1;
        double best_ratio = kInf;
        for (int r = 0; r < m; ++r) {
            double a = T(r, enter);
            if (a > kPivTol) {
                double ratio = T(r, nvar) / a;
                if (ratio < best_ratio - 1e-15 ||
                    (ratio < best_ratio + 1e-15 && (leave < 0 || basis[r] < basis[leave]))) {
                    best_ratio = ratio;
                    leave = r;
                }
            }
        }
        if (leave < 0) throw NumericalError("lp_min_cost: unbounded (should not happen on a polytope)");
        // pivot on (leave, enter)
        T.row(leave) /= T(leave, enter);
        for (int r = 0; r < m; ++r) {
            if (r == leave) continue;
            double f = T(r, enter);
            if (f != 0.0) T.row(r) -= f * T.row(leave);
        }
        basis[leave] = enter;
        ++iterations;
        return true;
    }
};

}  // namespace

LpResult lp_min_cost(const CostKernel& c, int cap) {
    const int n = c.size();
    if (n > cap) throw DomainError("lp_min_cost: kernel size exceeds the LP cap");

    // structural variables: one per finite-cost arc
    std::vector<std::pair<int, int>> arcs;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::isfinite(c(i, j))) arcs.emplace_back(i, j);
    const int ne = static_cast<int>(arcs.size());
    // rows: balance for i = 0..n-2 (the last is dependent), then mass
    const int m = n;
    const int ncols = ne + m;

    Simplex s;
    s.m = m;
    s.nvar = ncols;
    s.T = Matrix::Zero(m, ncols + 1);
    for (int e = 0; e < ne; ++e) {
        auto [i, j] = arcs[e];
        if (i < n - 1) s.T(i, e) += 1.0;
        if (j < n - 1) s.T(j, e) -= 1.0;
        s.T(m - 1, e) = 1.0;
    }
    for (int r = 0; r < m; ++r) s.T(r, ne + r) = 1.0;  // artificials
    s.T(m - 1, ncols) = 1.0;                            // mass rhs
    s.basis.resize(m);
    std::iota(s.basis.begin(), s.basis.end(), ne);

    const int iter_cap = 200000;
    // phase 1: drive the artificials to zero
    Vector phase1 = Vector::Zero(ncols);
    for (int r = 0; r < m; ++r) phase1(ne + r) = 1.0;
    while (s.pivot_step(phase1, ncols))
        if (s.iterations > iter_cap) throw NumericalError("lp_min_cost: phase-1 iteration cap");
    double art = 0.0;
    for (int r = 0; r < m; ++r)
        if (s.basis[r] >= ne) art += std::abs(s.T(r, ncols));
    if (art > 1e-9) throw NumericalError("lp_min_cost: infeasible (no closed measure found)");

    // phase 2: original costs, artificials priced out
    Vector phase2 = Vector::Zero(ncols);
    for (int e = 0; e < ne; ++e) phase2(e) = c(arcs[e].first, arcs[e].second);
    for (int r = 0; r < m; ++r) phase2(ne + r) = 0.0;
    while (s.pivot_step(phase2, ne))
        if (s.iterations > iter_cap) throw NumericalError("lp_min_cost: phase-2 iteration cap");

    LpResult out;
    out.iterations = s.iterations;
    out.measure.n = n;
    double value = 0.0;
    for (int r = 0; r < m; ++r) {
        if (s.basis[r] < ne) {
            double w = s.T(r, ncols);
            if (w > 1e-12) {
                auto [i, j] = arcs[s.basis[r]];
                out.measure.weights.emplace_back(i, j, w);
                value += w * c(i, j);
            }
        }
    }
    std::sort(out.measure.weights.begin(), out.measure.weights.end());
    out.value = value;
    out.measure.validate();
    return out;
}

namespace {

// Johnson's simple-cycle enumeration with Tarjan SCC preprocessing.
struct JohnsonState {
    int n;
    std::vector<std::vector<int>> adj;
    std::vector<bool> blocked;
    std::vector<std::set<int>> blocked_map;
    std::vector<int> stack;
    std::vector<std::vector<int>>* out;
    int cap;
    bool hit_cap = false;
    int start = 0;

    void unblock(int u) {
        blocked[u] = false;
        for (int w : blocked_map[u])
            if (blocked[w]) unblock(w);
        blocked_map[u].clear();
    }

    bool circuit(int v, const std::vector<bool>& in_scc) {
        if (hit_cap) return true;
        bool found = false;
        stack.push_back(v);
        blocked[v] = true;
        for (int w : adj[v]) {
            if (!in_scc[w] || w < start) continue;
            if (w == start) {
                if (static_cast<int>(out->size()) >= cap) {
                    hit_cap = true;
                    break;
                }
                out->push_back(stack);
                found = true;
            } else if (!blocked[w]) {
                if (circuit(w, in_scc)) found = true;
                if (hit_cap) break;
            }
        }
        if (found) {
            unblock(v);
        } else {
            for (int w : adj[v])
                if (in_scc[w] && w >= start) blocked_map[w].insert(v);
        }
        stack.pop_back();
        return found;
    }
};

void tarjan_scc(int n, const std::vector<std::vector<int>>& adj, std::vector<int>& comp) {
    comp.assign(n, -1);
    std::vector<int> index(n, -1), low(n, 0), st;
    std::vector<bool> on_stack(n, false);
    int counter = 0, ncomp = 0;
    // iterative Tarjan
    struct Frame { int v; size_t ei; };
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> frames{{root, 0}};
        while (!frames.empty()) {
            auto& [v, ei] = frames.back();
            if (ei == 0) {
                index[v] = low[v] = counter++;
                st.push_back(v);
                on_stack[v] = true;
            }
            bool descended = false;
            while (ei < adj[v].size()) {
                int w = adj[v][ei++];
                if (index[w] == -1) {
                    frames.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                int w;
                do {
                    w = st.back();
                    st.pop_back();
                    on_stack[w] = false;
                    comp[w] = ncomp;
                } while (w != v);
                ++ncomp;
            }
            int finished = v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[finished]);
        }
    }
}

}  // namespace

bool enumerate_simple_cycles(int n, const std::vector<std::pair<int, int>>& arcs, int cap,
                             std::vector<std::vector<int>>& out) {
    out.clear();
    JohnsonState js;
    js.n = n;
    js.adj.assign(n, {});
    for (auto& [i, j] : arcs) {
        if (i == j) {
            if (static_cast<int>(out.size()) < cap) out.push_back({i});
            else return false;
        } else {
            js.adj[i].push_back(j);
        }
    }
    for (auto& a : js.adj) std::sort(a.begin(), a.end());
    js.out = &out;
    js.cap = cap;

    std::vector<int> comp;
    tarjan_scc(n, js.adj, comp);
    for (int start = 0; start < n; ++start) {
        if (js.hit_cap) break;
        std::vector<bool> in_scc(n, false);
        for (int v = 0; v < n; ++v) in_scc[v] = (comp[v] == comp[start]);
        js.blocked.assign(n, false);
        js.blocked_map.assign(n, {});
        js.stack.clear();
        js.start = start;
        js.circuit(start, in_scc);
    }
    return !js.hit_cap;
}

MatherFamily extremal_measures(const CostKernel& c, const AubryData& a, int cap) {
    MatherFamily f;
    const double c0 = critical_value_karp(c).value;
    f.lp_value = -c0;
    std::vector<std::vector<int>> cycles;
    f.capped = !enumerate_simple_cycles(c.size(), a.pairs, cap, cycles);
    for (auto& cyc : cycles) {
        double total = 0.0;
        for (size_t k = 0; k < cyc.size(); ++k) total += c(cyc[k], cyc[(k + 1) % cyc.size()]);
        double mean = total / static_cast<double>(cyc.size());
        if (std::abs(mean + c0) <= a.tolerance) {
            f.cycles.push_back(cyc);
            f.extremals.push_back(cycle_measure(c.size(), cyc));
        }
    }
    return f;
}

MatherSet mather_set(const MatherFamily& f) {
    if (f.extremals.empty()) throw DomainError("mather_set: empty family");
    MatherSet s;
    std::set<int> pts;
    std::set<std::pair<int, int>> prs;
    for (auto& mu : f.extremals)
        for (auto& [i, j, w] : mu.weights) {
            pts.insert(i);
            pts.insert(j);
            prs.insert({i, j});
        }
    s.projected.assign(pts.begin(), pts.end());
    s.pairs.assign(prs.begin(), prs.end());
    return s;
}

double rotation_number_of_measure(const CostKernel& c, const ClosedMeasure& mu) {
    if (!c.space().is_circle() || !c.has_displacement())
        throw DomainError("rotation_number_of_measure: circle-grid kernel with displacement required");
    double r = 0.0;
    for (auto& [i, j, w] : mu.weights) r += w * c.displacement()(i, j);
    return r;
}

}  // namespace weakkam
