#include "subiso/matching.hpp"

#include "subiso/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace subiso {

void validate(const BipartiteMatchingInstance& inst)
{
    if (inst.n_left <= 0 || inst.n_left != inst.n_right)
        throw InvalidInstance("sides must be nonempty and of equal size");
    if (!(inst.delta > 0 && inst.delta < 1))
        throw InvalidInstance("delta must lie in (0,1)");
    std::vector<double> load(static_cast<std::size_t>(inst.n_vertices()), 0.0);
    std::set<std::pair<int, int>> seen;
    for (const MatchEdge& e : inst.edges) {
        if (e.u < 0 || e.u >= inst.n_left || e.v < 0 || e.v >= inst.n_right)
            throw InvalidInstance("edge endpoint out of range");
        if (!seen.insert({e.u, e.v}).second)
            throw InvalidInstance("duplicate edge");
        if (!(e.x0 >= 0 && e.x0 <= 1))
            throw InvalidInstance("x0 outside [0,1]");
        load[static_cast<std::size_t>(e.u)] += e.x0;
        load[static_cast<std::size_t>(inst.n_left + e.v)] += e.x0;
    }
    for (std::size_t v = 0; v < load.size(); ++v)
        if (std::abs(load[v] - 1) > 1e-9) {
            std::ostringstream os;
            os << "vertex " << v << " carries " << load[v] << " instead of 1";
            throw InvalidInstance(os.str());
        }
}

Eigen::VectorXd initial_point(const BipartiteMatchingInstance& inst)
{
    Eigen::VectorXd x(static_cast<Eigen::Index>(inst.edges.size()));
    for (std::size_t e = 0; e < inst.edges.size(); ++e)
        x[static_cast<Eigen::Index>(e)] = inst.edges[e].x0;
    return x;
}

SupportTopology analyze_graph(int n, const std::vector<std::pair<int, int>>& endpoints, const std::vector<int>& ids)
{
    if (endpoints.size() != ids.size())
        throw BadShape("one id per edge required");
    SupportTopology top;
    top.n_edges = static_cast<int>(endpoints.size());
    top.degree.assign(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n));  // (local edge, other end)
    for (int k = 0; k < top.n_edges; ++k) {
        const auto [a, b] = endpoints[static_cast<std::size_t>(k)];
        if (a < 0 || b < 0 || a >= n || b >= n || a == b)
            throw BadShape("edge endpoints must be distinct vertices in range");
        adj[static_cast<std::size_t>(a)].emplace_back(k, b);
        adj[static_cast<std::size_t>(b)].emplace_back(k, a);
        ++top.degree[static_cast<std::size_t>(a)];
        ++top.degree[static_cast<std::size_t>(b)];
    }
    auto deg = [&](int v) { return top.degree[static_cast<std::size_t>(v)]; };
    for (int v = 0; v < n; ++v) {
        if (deg(v) == 1)
            ++top.d1;
        else if (deg(v) == 2)
            ++top.d2;
        else if (deg(v) >= 3)
            ++top.d3plus;
    }

    std::vector<int> comp_of(static_cast<std::size_t>(n), -1);
    for (int s = 0; s < n; ++s) {
        if (deg(s) == 0 || comp_of[static_cast<std::size_t>(s)] >= 0)
            continue;
        SupportComponent c;
        const int cid = static_cast<int>(top.components.size());
        std::vector<int> stack{s};
        comp_of[static_cast<std::size_t>(s)] = cid;
        std::set<int> edges;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            c.vertices.push_back(u);
            for (const auto& [k, w] : adj[static_cast<std::size_t>(u)]) {
                edges.insert(k);
                if (comp_of[static_cast<std::size_t>(w)] < 0) {
                    comp_of[static_cast<std::size_t>(w)] = cid;
                    stack.push_back(w);
                }
            }
        }
        std::sort(c.vertices.begin(), c.vertices.end());
        for (int k : edges)
            c.edges.push_back(ids[static_cast<std::size_t>(k)]);
        c.cycle = std::all_of(c.vertices.begin(), c.vertices.end(), [&](int v) { return deg(v) == 2; });
        if (c.cycle) {
            int prev_edge = -1, u = s;
            do {
                const auto& nb = adj[static_cast<std::size_t>(u)];
                const auto& step = nb[0].first != prev_edge ? nb[0] : nb[1];
                c.cycle_edges.push_back(ids[static_cast<std::size_t>(step.first)]);
                prev_edge = step.first;
                u = step.second;
            } while (u != s);
        }
        top.components.push_back(std::move(c));
    }

    std::vector<char> used(endpoints.size(), 0);
    for (int s = 0; s < n; ++s) {
        if (deg(s) == 0 || deg(s) == 2)
            continue;
        for (const auto& start : adj[static_cast<std::size_t>(s)]) {
            if (used[static_cast<std::size_t>(start.first)])
                continue;
            DegreePath p;
            p.component = comp_of[static_cast<std::size_t>(s)];
            p.vertices.push_back(s);
            int k = start.first, u = start.second;
            for (;;) {
                used[static_cast<std::size_t>(k)] = 1;
                p.edges.push_back(ids[static_cast<std::size_t>(k)]);
                p.vertices.push_back(u);
                if (deg(u) != 2)
                    break;
                const auto& nb = adj[static_cast<std::size_t>(u)];
                const auto& next = nb[0].first != k ? nb[0] : nb[1];
                k = next.first;
                u = next.second;
            }
            top.paths.push_back(std::move(p));
        }
    }
    return top;
}

SupportTopology analyze_support(const FractionalState& state, const BipartiteMatchingInstance& inst)
{
    std::vector<std::pair<int, int>> ends;
    for (int e : state.alive)
        ends.push_back(inst.endpoints(e));
    return analyze_graph(inst.n_vertices(), ends, state.alive);
}

DropPlan drop_plan(const SupportTopology& topology, int t, Rng& rng)
{
    if (t < 1)
        throw PreconditionViolated("t must be at least 1");
    const std::size_t period = 4 * static_cast<std::size_t>(t);
    DropPlan plan;
    for (std::size_t c = 0; c < topology.components.size(); ++c) {
        const SupportComponent& comp = topology.components[c];
        if (!comp.cycle || comp.cycle_edges.size() <= period)
            continue;
        const std::size_t r = rng.uniform_int(comp.cycle_edges.size());
        for (std::size_t k = 0; k < comp.cycle_edges.size(); k += period) {
            plan.edges.push_back(comp.cycle_edges[(r + k) % comp.cycle_edges.size()]);
            plan.provenance.push_back("cycle " + std::to_string(c) + " start " + std::to_string(r));
        }
    }
    for (const DegreePath& p : topology.paths) {
        if (p.edges.size() <= period)
            continue;
        const std::size_t offset = 1 + rng.uniform_int(period);
        for (std::size_t k = offset; k <= p.edges.size(); k += period) {
            plan.edges.push_back(p.edges[k - 1]);
            plan.provenance.push_back("path in component " + std::to_string(p.component) + " offset " +
                                      std::to_string(offset));
        }
    }
    return plan;
}

PathBound lemma_path_bound(const SupportTopology& topology, int t)
{
    if (t < 1)
        throw PreconditionViolated("t must be at least 1");
    for (const SupportComponent& c : topology.components)
        if (c.cycle)
            throw PreconditionViolated("a component is a cycle");
    for (const DegreePath& p : topology.paths)
        if (p.interior() >= t)
            throw PreconditionViolated("degree-2 path with " + std::to_string(p.interior()) + " vertices");
    PathBound b;
    b.lhs = topology.n_edges;
    b.rhs = (1 + 1.0 / (4 * t)) * (topology.d2 + topology.d3plus);
    b.pass = b.lhs >= b.rhs - 1e-12;
    return b;
}

int matching_t(double delta)
{
    return static_cast<int>(std::ceil(4 / delta - 1e-12));
}

double matching_slack(double delta)
{
    return 1.0 / (32 * matching_t(delta));
}

OracleContract matching_oracle(const BipartiteMatchingInstance& inst)
{
    validate(inst);
    OracleContract c;
    c.delta = matching_slack(inst.delta);
    c.name = "matching";
    const int t = matching_t(inst.delta);
    c.subspace = [inst, t](const FractionalState& st, Rng& rng) {
        const SupportTopology top = analyze_support(st, inst);
        SubspaceSpec spec;
        DropPlan plan = drop_plan(top, t, rng);
        if (!plan.edges.empty()) {
            spec.forced_zero = std::move(plan.edges);
            std::ostringstream os;
            for (std::size_t k = 0; k < plan.provenance.size(); ++k)
                os << (k ? "; " : "drop ") << plan.provenance[k];
            spec.note = os.str();
            return spec;
        }
        std::vector<SparseRow> rows(static_cast<std::size_t>(inst.n_vertices()));
        for (int e : st.alive) {
            const auto [a, b] = inst.endpoints(e);
            rows[static_cast<std::size_t>(a)].entries.emplace_back(e, 1.0);
            rows[static_cast<std::size_t>(b)].entries.emplace_back(e, 1.0);
        }
        for (int v = 0; v < inst.n_vertices(); ++v)
            if (top.degree[static_cast<std::size_t>(v)] >= 2) {
                rows[static_cast<std::size_t>(v)].label = "vertex " + std::to_string(v);
                spec.rows.push_back(std::move(rows[static_cast<std::size_t>(v)]));
            }
        return spec;
    };
    return c;
}

MatchingReport verify_matching(const BipartiteMatchingInstance& inst, const RoundingOutcome& outcome)
{
    if (outcome.X.size() != static_cast<Eigen::Index>(inst.edges.size()))
        throw BadShape("outcome length differs from the edge count");
    MatchingReport rep;
    std::vector<int> load(static_cast<std::size_t>(inst.n_vertices()), 0);
    for (int e = 0; e < static_cast<int>(inst.edges.size()); ++e) {
        const double v = outcome.X[e];
        if (v != 0 && v != 1)
            throw PreconditionViolated("outcome is not integral at edge " + std::to_string(e));
        if (v == 1) {
            const auto [a, b] = inst.endpoints(e);
            ++load[static_cast<std::size_t>(a)];
            ++load[static_cast<std::size_t>(b)];
            rep.value += inst.edges[static_cast<std::size_t>(e)].x0;
        }
    }
    rep.is_matching = std::all_of(load.begin(), load.end(), [](int d) { return d <= 1; });
    for (int d : load) {
        rep.matched.push_back(static_cast<char>(d > 0));
        rep.n_matched += d > 0;
    }
    rep.pass = rep.is_matching;
    return rep;
}

}  // namespace subiso
