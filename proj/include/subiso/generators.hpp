#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "subiso/degmat.hpp"
#include "subiso/makespan.hpp"
#include "subiso/matching.hpp"
#include "subiso/sparse_lp.hpp"
#include "subiso/types.hpp"

namespace subiso {

// x = 1/2 on n coordinates split into n/t blocks of t equal coordinates.
struct BlockInstance {
    int n = 0;
    int t = 1;
    Eigen::VectorXd x0;
    std::vector<SparseRow> rows;  // x_k - x_{k+1} = 0 inside each block

    double delta() const { return 1.0 / t; }
};

BlockInstance gen_block_instance(int n, int t);
OracleContract block_oracle(const BlockInstance& inst);

// Independent coordinates; only the trivial oracle acts on them.
struct TrivialInstance {
    Eigen::VectorXd x0;
    double delta = 0.5;
};

TrivialInstance gen_trivial_instance(int n, double value);

// 0/1 matrix with `col_sum` ones per column (L1), or a +-1 matrix (L2);
// x0 uniform on (0,1).
SparseLPInstance gen_sparse_lp(int m, int n, int col_sum, NormMode mode, std::uint64_t seed);

// Sizes uniform in [0.2, 1]. x0 averages `combos` random assignments; T is the
// largest fractional load, raised to the largest supported size when needed.
MakespanInstance gen_makespan(int m, int r, std::uint64_t seed, int q = 1, int combos = 8, double delta = 0.25);

Graph petersen_graph();
// Simple connected 3-regular graph on n (even, >= 4) vertices.
Graph random_cubic_graph(int n, std::uint64_t seed);

// Cycle of length l with x = (l-1)/l.
DegreeTreeInstance gen_tree_cycle(int l, double delta = 1.0 / 6 - 0.01);
// x0 averages `paths` random Hamiltonian paths, so x0(delta(v)) <= 2 = b.
DegreeTreeInstance gen_tree_from_graph(const Graph& g, std::uint64_t seed, int paths = 8,
                                       double delta = 1.0 / 6 - 0.01);

// "random": weighted average of `perms` random permutations.
// "cycle": a single cycle on 2n vertices with x = 1/2.
BipartiteMatchingInstance gen_matching(int n, const std::string& shape, std::uint64_t seed, double delta = 0.2,
                                       int perms = 4);

}  // namespace subiso
