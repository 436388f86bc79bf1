#pragma once

#include <boost/pending/disjoint_sets.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace subiso {

struct Edge {
    int u = 0;
    int v = 0;
    double cost = 0;
};

struct Graph {
    int n = 0;
    std::vector<Edge> edges;
};

// Union-find over 0..n-1 that tracks the number of classes.
class Components {
public:
    explicit Components(int n);
    int find(int a);
    bool unite(int a, int b);
    int count() const { return count_; }

private:
    boost::disjoint_sets_with_storage<> sets_;
    int count_;
};

bool is_connected(int n, const std::vector<std::pair<int, int>>& edges);
bool is_spanning_tree(int n, const std::vector<std::pair<int, int>>& edges);

// Capacities are fixed-point integers; `unit` converts reals.
class FlowNetwork {
public:
    static constexpr std::int64_t unit = std::int64_t(1) << 40;
    static constexpr std::int64_t infinite = std::int64_t(1) << 60;

    explicit FlowNetwork(int vertices);
    void add_arc(int from, int to, std::int64_t cap);
    void add_edge(int a, int b, std::int64_t cap);  // both directions
    std::int64_t max_flow(int s, int t);
    // Vertices reachable from s in the residual graph: the minimal minimum cut side.
    std::vector<char> source_side(int s) const;

private:
    struct Arc {
        int from;
        int to;
        std::int64_t cap;
        std::int64_t residual;
    };
    std::vector<Arc> arcs_;
    int n_;
};

std::int64_t to_fixed(double v);

// Minimizes |S| - z(E[S]) + penalty*|S| over vertex sets S containing
// `forced`, for z >= 0 on a graph with `n` vertices. Returns |S| - z(E[S]) at
// the minimal minimizer, and that minimizer.
std::pair<double, std::vector<char>> min_tree_slack(int n, const std::vector<std::pair<int, int>>& edges,
                                                    const std::vector<double>& z, const std::vector<int>& forced,
                                                    double penalty = 0);

}  // namespace subiso
