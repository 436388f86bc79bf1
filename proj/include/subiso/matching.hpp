#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

#include "subiso/rng.hpp"
#include "subiso/types.hpp"

namespace subiso {

struct MatchEdge {
    int u = 0;  // left vertex
    int v = 0;  // right vertex
    double x0 = 0;
};

// Left vertices are 0..n_left-1, right vertices n_left..n_left+n_right-1.
struct BipartiteMatchingInstance {
    int n_left = 0;
    int n_right = 0;
    std::vector<MatchEdge> edges;
    double delta = 0.2;

    int n_vertices() const { return n_left + n_right; }
    std::pair<int, int> endpoints(int e) const
    {
        const MatchEdge& m = edges[static_cast<std::size_t>(e)];
        return {m.u, n_left + m.v};
    }
};

void validate(const BipartiteMatchingInstance& inst);
Eigen::VectorXd initial_point(const BipartiteMatchingInstance& inst);

struct DegreePath {
    std::vector<int> edges;     // in walking order
    std::vector<int> vertices;  // edges.size() + 1 vertices, endpoints included
    int component = 0;

    int interior() const { return static_cast<int>(vertices.size()) - 2; }
};

struct SupportComponent {
    std::vector<int> vertices;
    std::vector<int> edges;
    bool cycle = false;
    std::vector<int> cycle_edges;  // walking order when cycle
};

struct SupportTopology {
    std::vector<SupportComponent> components;
    std::vector<DegreePath> paths;  // maximal degree-2 paths of non-cycle components
    std::vector<int> degree;
    int n_edges = 0;
    int d1 = 0;
    int d2 = 0;
    int d3plus = 0;
};

// Topology of the graph on `n` vertices with the listed edges; edge ids are
// carried through unchanged.
SupportTopology analyze_graph(int n, const std::vector<std::pair<int, int>>& endpoints, const std::vector<int>& ids);
SupportTopology analyze_support(const FractionalState& state, const BipartiteMatchingInstance& inst);

struct DropPlan {
    std::vector<int> edges;
    std::vector<std::string> provenance;
};

// Breaks every cycle and degree-2 path longer than 4t edges by dropping
// every 4t-th edge from a random start.
DropPlan drop_plan(const SupportTopology& topology, int t, Rng& rng);

struct PathBound {
    double lhs = 0;  // |E|
    double rhs = 0;  // (1 + 1/(4t)) (d2 + d3plus)
    bool pass = false;
};

// Requires no cycle components and no degree-2 path with t or more interior vertices.
PathBound lemma_path_bound(const SupportTopology& topology, int t);

int matching_t(double delta);
double matching_slack(double delta);

OracleContract matching_oracle(const BipartiteMatchingInstance& inst);

struct MatchingReport {
    std::vector<char> matched;  // per vertex
    int n_matched = 0;
    bool is_matching = false;
    double value = 0;           // sum of x0 over chosen edges
    bool pass = false;
};

MatchingReport verify_matching(const BipartiteMatchingInstance& inst, const RoundingOutcome& outcome);

}  // namespace subiso
