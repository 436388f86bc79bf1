#include "subiso/generators.hpp"

#include "subiso/errors.hpp"
#include "subiso/walk.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace subiso {

namespace {

// Fisher-Yates with the project generator, so outputs do not depend on the
// standard library's shuffle.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng)
{
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.uniform_int(i)]);
}

std::vector<std::vector<int>> adjacency(const Graph& g)
{
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.n));
    for (const Edge& e : g.edges) {
        adj[static_cast<std::size_t>(e.u)].push_back(e.v);
        adj[static_cast<std::size_t>(e.v)].push_back(e.u);
    }
    return adj;
}

// Randomized depth-first search with a node budget.
bool extend_path(const std::vector<std::vector<int>>& adj, std::vector<int>& path, std::vector<char>& on,
                 Rng& rng, long& budget)
{
    if (path.size() == adj.size())
        return true;
    if (--budget < 0)
        return false;
    std::vector<int> next = adj[static_cast<std::size_t>(path.back())];
    shuffle(next, rng);
    for (int v : next) {
        if (on[static_cast<std::size_t>(v)])
            continue;
        on[static_cast<std::size_t>(v)] = 1;
        path.push_back(v);
        if (extend_path(adj, path, on, rng, budget))
            return true;
        path.pop_back();
        on[static_cast<std::size_t>(v)] = 0;
    }
    return false;
}

std::vector<int> hamiltonian_path(const Graph& g, Rng& rng)
{
    const auto adj = adjacency(g);
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<int> path{static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(g.n)))};
        std::vector<char> on(static_cast<std::size_t>(g.n), 0);
        on[static_cast<std::size_t>(path[0])] = 1;
        long budget = 200000;
        if (extend_path(adj, path, on, rng, budget))
            return path;
    }
    throw InvalidInstance("no Hamiltonian path found");
}

}  // namespace

BlockInstance gen_block_instance(int n, int t)
{
    if (t < 1 || n < 1 || n % t != 0)
        throw BadShape("block size " + std::to_string(t) + " does not divide " + std::to_string(n));
    BlockInstance b;
    b.n = n;
    b.t = t;
    b.x0 = Eigen::VectorXd::Constant(n, 0.5);
    for (int blk = 0; blk < n / t; ++blk)
        for (int k = 0; k + 1 < t; ++k) {
            const int i = blk * t + k;
            b.rows.push_back({{{i, 1.0}, {i + 1, -1.0}}, "block " + std::to_string(blk)});
        }
    return b;
}

OracleContract block_oracle(const BlockInstance& inst)
{
    OracleContract c = rows_oracle(inst.rows, inst.delta());
    c.name = "block";
    return c;
}

TrivialInstance gen_trivial_instance(int n, double value)
{
    if (n < 1 || !(value >= 0 && value <= 1))
        throw BadShape("need n >= 1 and a value in [0,1]");
    return {Eigen::VectorXd::Constant(n, value), 0.5};
}

SparseLPInstance gen_sparse_lp(int m, int n, int col_sum, NormMode mode, std::uint64_t seed)
{
    if (m < 1 || n < 1 || (mode == NormMode::L1 && (col_sum < 1 || col_sum > m)))
        throw BadShape("need m, n >= 1 and 1 <= col_sum <= m");
    Rng rng(seed, 0);
    SparseLPInstance inst;
    inst.norm_mode = mode;
    inst.delta = 0.5;
    inst.A = Eigen::MatrixXd::Zero(m, n);
    std::vector<int> rows(static_cast<std::size_t>(m));
    std::iota(rows.begin(), rows.end(), 0);
    for (int j = 0; j < n; ++j) {
        if (mode == NormMode::L1) {
            shuffle(rows, rng);
            for (int k = 0; k < col_sum; ++k)
                inst.A(rows[static_cast<std::size_t>(k)], j) = 1;
        } else {
            for (int i = 0; i < m; ++i)
                inst.A(i, j) = rng.sign();
        }
    }
    inst.x0.resize(n);
    for (int j = 0; j < n; ++j)
        inst.x0[j] = 0.05 + 0.9 * rng.uniform();
    return inst;
}

MakespanInstance gen_makespan(int m, int r, std::uint64_t seed, int q, int combos, double delta)
{
    if (m < 1 || r < 1 || q < 1 || combos < 1)
        throw BadShape("need m, r, q, combos >= 1");
    Rng rng(seed, 0);
    MakespanInstance inst;
    inst.m = m;
    inst.r = r;
    inst.q = q;
    inst.delta = delta;
    for (int h = 0; h < q; ++h) {
        Eigen::MatrixXd p(m, r);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < r; ++j)
                p(i, j) = 0.2 + 0.8 * rng.uniform();
        inst.p.push_back(p);
    }
    inst.x0 = Eigen::MatrixXd::Zero(m, r);
    for (int c = 0; c < combos; ++c)
        for (int j = 0; j < r; ++j)
            inst.x0(static_cast<Eigen::Index>(rng.uniform_int(static_cast<std::uint64_t>(m))), j) += 1.0 / combos;
    for (int h = 0; h < q; ++h) {
        const Eigen::MatrixXd& p = inst.p[static_cast<std::size_t>(h)];
        double t = p.cwiseProduct(inst.x0).rowwise().sum().maxCoeff();
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < r; ++j)
                if (inst.x0(i, j) > 0)
                    t = std::max(t, p(i, j));
        inst.T.push_back(t);
    }
    return inst;
}

Graph petersen_graph()
{
    Graph g;
    g.n = 10;
    for (int i = 0; i < 5; ++i) {
        g.edges.push_back({i, (i + 1) % 5, 0});
        g.edges.push_back({i, i + 5, 0});
        g.edges.push_back({i + 5, (i + 2) % 5 + 5, 0});
    }
    return g;
}

Graph random_cubic_graph(int n, std::uint64_t seed)
{
    if (n < 4 || n % 2 != 0)
        throw BadShape("cubic graphs need an even n >= 4");
    for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng(seed, attempt);
        std::vector<int> stubs;
        for (int v = 0; v < n; ++v)
            stubs.insert(stubs.end(), 3, v);
        shuffle(stubs, rng);
        std::set<std::pair<int, int>> seen;
        Graph g;
        g.n = n;
        bool ok = true;
        for (std::size_t k = 0; k < stubs.size() && ok; k += 2) {
            const int a = std::min(stubs[k], stubs[k + 1]), b = std::max(stubs[k], stubs[k + 1]);
            ok = a != b && seen.insert({a, b}).second;
            g.edges.push_back({a, b, 0});
        }
        std::vector<std::pair<int, int>> ends;
        for (const Edge& e : g.edges)
            ends.emplace_back(e.u, e.v);
        if (ok && is_connected(n, ends))
            return g;
    }
}

DegreeTreeInstance gen_tree_cycle(int l, double delta)
{
    if (l < 3)
        throw BadShape("cycle length must be at least 3");
    DegreeTreeInstance inst;
    inst.graph.n = l;
    for (int i = 0; i < l; ++i)
        inst.graph.edges.push_back({i, (i + 1) % l, 1.0});
    inst.degree_sets = vertex_degree_sets(inst.graph, 2);
    inst.x0 = Eigen::VectorXd::Constant(l, static_cast<double>(l - 1) / l);
    inst.delta = delta;
    inst.q = 2;
    return inst;
}

DegreeTreeInstance gen_tree_from_graph(const Graph& g, std::uint64_t seed, int paths, double delta)
{
    if (g.n < 2 || paths < 1)
        throw BadShape("need at least two vertices and one path");
    Rng rng(seed, 0);
    DegreeTreeInstance inst;
    inst.graph = g;
    std::map<std::pair<int, int>, int> index;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        inst.graph.edges[e].cost = 1.0 + static_cast<double>(rng.uniform_int(10));
        index[{std::min(g.edges[e].u, g.edges[e].v), std::max(g.edges[e].u, g.edges[e].v)}] = static_cast<int>(e);
    }
    inst.x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.edges.size()));
    for (int k = 0; k < paths; ++k) {
        const std::vector<int> path = hamiltonian_path(g, rng);
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
            inst.x0[index.at({std::min(path[i], path[i + 1]), std::max(path[i], path[i + 1])})] += 1.0 / paths;
    }
    inst.degree_sets = vertex_degree_sets(inst.graph, 2);
    inst.delta = delta;
    inst.q = 2;
    return inst;
}

BipartiteMatchingInstance gen_matching(int n, const std::string& shape, std::uint64_t seed, double delta, int perms)
{
    if (n < 1)
        throw BadShape("need n >= 1");
    BipartiteMatchingInstance inst;
    inst.n_left = inst.n_right = n;
    inst.delta = delta;
    if (shape == "cycle") {
        if (n < 2)
            throw BadShape("a cycle needs n >= 2");
        for (int i = 0; i < n; ++i) {
            inst.edges.push_back({i, i, 0.5});
            inst.edges.push_back({(i + 1) % n, i, 0.5});
        }
        return inst;
    }
    if (shape != "random")
        throw BadShape("unknown matching shape '" + shape + "'");
    if (perms < 1)
        throw BadShape("need perms >= 1");
    Rng rng(seed, 0);
    std::vector<double> w(static_cast<std::size_t>(perms));
    for (double& v : w)
        v = 0.5 + rng.uniform();
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::map<std::pair<int, int>, double> x;
    std::vector<int> pi(static_cast<std::size_t>(n));
    for (int k = 0; k < perms; ++k) {
        std::iota(pi.begin(), pi.end(), 0);
        shuffle(pi, rng);
        for (int i = 0; i < n; ++i)
            x[{i, pi[static_cast<std::size_t>(i)]}] += w[static_cast<std::size_t>(k)] / total;
    }
    for (const auto& [uv, v] : x)
        inst.edges.push_back({uv.first, uv.second, v});
    return inst;
}

}  // namespace subiso
