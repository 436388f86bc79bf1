#pragma once

#include <Eigen/Dense>

#include <vector>

#include "subiso/graph.hpp"
#include "subiso/types.hpp"

namespace subiso {

struct DegreeSet {
    std::vector<int> edges;
    int b = 0;
};

struct DegreeTreeInstance {
    Graph graph;
    std::vector<DegreeSet> degree_sets;
    Eigen::VectorXd x0;  // point of the spanning-tree polytope
    double delta = 1.0 / 6 - 0.01;
    int q = 2;           // max number of degree sets covering an edge
};

// S_v = edges incident to v, with the same bound for every vertex.
std::vector<DegreeSet> vertex_degree_sets(const Graph& g, int b);
int cover_number(const DegreeTreeInstance& inst);
void validate(const DegreeTreeInstance& inst);

double degree_excess(const FractionalState& state, const DegreeTreeInstance& inst, int j);

// Nested tight sets of the support after contracting x = 1 edges and
// deleting x = 0 edges. The last element holds every alive edge.
struct ChainFamily {
    std::vector<std::vector<int>> vertices;  // original vertex ids
    std::vector<std::vector<int>> edges;     // alive edge ids, sorted

    std::size_t size() const { return edges.size(); }
    std::vector<SparseRow> rows() const;
};

ChainFamily tight_chain(const FractionalState& state, const DegreeTreeInstance& inst);

// Every tight rank row, by enumeration of vertex subsets of the contracted
// support (at most 20 vertices).
std::vector<SparseRow> tight_rows_bruteforce(const FractionalState& state, const DegreeTreeInstance& inst);

// True iff the chain rows and the enumerated tight rows span the same space.
bool chain_matches_bruteforce(const FractionalState& state, const DegreeTreeInstance& inst);

// Largest g <= gamma_cap such that x +- g*y stays in the spanning-tree polytope.
double tree_step_limit(const FractionalState& state, const DegreeTreeInstance& inst, const Eigen::VectorXd& y,
                       double gamma_cap);

OracleContract degmat_oracle(const DegreeTreeInstance& inst);

struct TreeReport {
    std::vector<int> degree;     // |X cap S_j|
    std::vector<int> violation;  // |X cap S_j| - b_j
    int max_violation = 0;
    double bound = 0;            // q / (1 - 2 delta)
    double cost = 0;
    double fractional_cost = 0;
    bool pass = false;
};

TreeReport verify_tree(const DegreeTreeInstance& inst, const RoundingOutcome& outcome);

}  // namespace subiso
