#include "subiso/graph.hpp"

#include "subiso/errors.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/push_relabel_max_flow.hpp>

#include <algorithm>
#include <cmath>
#include <queue>

namespace subiso {

Components::Components(int n) : sets_(static_cast<std::size_t>(n)), count_(n) {}

int Components::find(int a)
{
    return static_cast<int>(sets_.find_set(a));
}

bool Components::unite(int a, int b)
{
    a = find(a);
    b = find(b);
    if (a == b)
        return false;
    sets_.link(a, b);
    --count_;
    return true;
}

bool is_connected(int n, const std::vector<std::pair<int, int>>& edges)
{
    Components c(n);
    for (const auto& [u, v] : edges)
        c.unite(u, v);
    return c.count() <= 1;
}

bool is_spanning_tree(int n, const std::vector<std::pair<int, int>>& edges)
{
    if (static_cast<int>(edges.size()) != n - 1)
        return false;
    return is_connected(n, edges);
}

std::int64_t to_fixed(double v)
{
    return static_cast<std::int64_t>(std::llround(v * static_cast<double>(FlowNetwork::unit)));
}

FlowNetwork::FlowNetwork(int vertices) : n_(vertices) {}

void FlowNetwork::add_arc(int from, int to, std::int64_t cap)
{
    if (from < 0 || to < 0 || from >= n_ || to >= n_)
        throw BadShape("arc endpoint out of range");
    arcs_.push_back({from, to, cap, cap});
}

void FlowNetwork::add_edge(int a, int b, std::int64_t cap)
{
    add_arc(a, b, cap);
    add_arc(b, a, cap);
}

std::int64_t FlowNetwork::max_flow(int s, int t)
{
    using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
    using G = boost::adjacency_list<
        boost::vecS, boost::vecS, boost::directedS, boost::no_property,
        boost::property<boost::edge_capacity_t, std::int64_t,
                        boost::property<boost::edge_residual_capacity_t, std::int64_t,
                                        boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;
    G g(static_cast<std::size_t>(n_));
    auto cap = boost::get(boost::edge_capacity, g);
    auto rev = boost::get(boost::edge_reverse, g);
    auto res = boost::get(boost::edge_residual_capacity, g);
    std::vector<Traits::edge_descriptor> fwd;
    fwd.reserve(arcs_.size());
    for (const Arc& a : arcs_) {
        auto e = boost::add_edge(static_cast<std::size_t>(a.from), static_cast<std::size_t>(a.to), g).first;
        auto r = boost::add_edge(static_cast<std::size_t>(a.to), static_cast<std::size_t>(a.from), g).first;
        cap[e] = a.cap;
        cap[r] = 0;
        rev[e] = r;
        rev[r] = e;
        fwd.push_back(e);
    }
    const std::int64_t flow =
        boost::push_relabel_max_flow(g, static_cast<std::size_t>(s), static_cast<std::size_t>(t));
    for (std::size_t k = 0; k < arcs_.size(); ++k)
        arcs_[k].residual = res[fwd[k]];
    return flow;
}

std::vector<char> FlowNetwork::source_side(int s) const
{
    // Residual arcs: forward with spare capacity, backward where flow runs.
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_));
    for (const Arc& a : arcs_) {
        if (a.residual > 0)
            adj[static_cast<std::size_t>(a.from)].push_back(a.to);
        if (a.residual < a.cap)
            adj[static_cast<std::size_t>(a.to)].push_back(a.from);
    }
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    std::queue<int> q;
    q.push(s);
    seen[static_cast<std::size_t>(s)] = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : adj[static_cast<std::size_t>(u)])
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                q.push(v);
            }
    }
    return seen;
}

std::pair<double, std::vector<char>> min_tree_slack(int n, const std::vector<std::pair<int, int>>& edges,
                                                    const std::vector<double>& z, const std::vector<int>& forced,
                                                    double penalty)
{
    // cut(S + s) = unit * (z(E) - z(E[S]) + |S|) with
    // s->v: deg_z(v)/2, v->t: 1 + penalty, u--v: z_e/2.
    const int s = n, t = n + 1;
    FlowNetwork net(n + 2);
    std::vector<std::int64_t> half(edges.size()), deg(static_cast<std::size_t>(n), 0);
    std::int64_t total = 0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (z[e] < 0)
            throw PreconditionViolated("negative edge weight in tree slack");
        half[e] = to_fixed(z[e] / 2);
        deg[static_cast<std::size_t>(edges[e].first)] += half[e];
        deg[static_cast<std::size_t>(edges[e].second)] += half[e];
        total += 2 * half[e];
        net.add_edge(edges[e].first, edges[e].second, half[e]);
    }
    const std::int64_t extra = to_fixed(penalty);
    std::vector<char> is_forced(static_cast<std::size_t>(n), 0);
    for (int v : forced)
        is_forced[static_cast<std::size_t>(v)] = 1;
    for (int v = 0; v < n; ++v) {
        net.add_arc(s, v, is_forced[static_cast<std::size_t>(v)] ? FlowNetwork::infinite : deg[static_cast<std::size_t>(v)]);
        net.add_arc(v, t, FlowNetwork::unit + extra);
    }
    const std::int64_t cut = net.max_flow(s, t);
    std::vector<char> side = net.source_side(s);
    side.resize(static_cast<std::size_t>(n));
    const std::int64_t size = std::count(side.begin(), side.end(), 1);
    return {static_cast<double>(cut - total - size * extra) / static_cast<double>(FlowNetwork::unit), side};
}

}  // namespace subiso
