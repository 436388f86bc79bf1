#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace subiso {

class Rng;

// x^(k) plus alive/frozen bookkeeping. frozen_values[i] is -1 while i is alive.
struct FractionalState {
    Eigen::VectorXd x;
    std::vector<int> alive;
    std::vector<int> frozen_values;
    long iteration = 0;
    double integrality_tol = 1e-9;

    FractionalState() = default;
    explicit FractionalState(Eigen::VectorXd x0, double integrality_tol = 1e-9);

    int n() const { return static_cast<int>(x.size()); }
    int n_alive() const { return static_cast<int>(alive.size()); }
    bool is_alive(int i) const { return frozen_values[i] < 0; }

    void freeze(int i, int value);
    // Freezes every alive coordinate within integrality_tol of {0,1}.
    std::vector<int> snap();
    Eigen::VectorXd alive_values() const;
};

struct SparseRow {
    std::vector<std::pair<int, double>> entries;
    std::string label;
};

struct SubspaceSpec {
    std::vector<SparseRow> rows;
    std::vector<int> forced_zero;
    std::string note;
};

struct OracleContract {
    double delta = 0.5;
    std::function<SubspaceSpec(const FractionalState&, Rng&)> subspace;
    // Optional: largest g such that x +- g*y stays feasible for constraints the
    // rows do not conserve. y is indexed globally.
    std::function<double(const FractionalState&, const Eigen::VectorXd&)> step_limit;
    std::string name;
};

struct Residuals {
    double min_eig_u = 0;
    double min_eig_subiso = 0;
    double trace_slack = 0;
    double max_orthogonality = 0;
    double max_diag_excess = 0;
};

struct CovarianceCertificate {
    Eigen::MatrixXd U;
    double a = 0;
    double eta = 1;
    Residuals residuals;
    int iterations = 0;
    int excluded = 0;
};

struct IterationRecord {
    int n_alive = 0;
    int dim_w = 0;
    double gamma = 0;
    std::vector<int> frozen;
    std::vector<int> forced_zero;
    std::string note;
};

struct RoundingOutcome {
    Eigen::VectorXd X;
    std::vector<IterationRecord> trace;
    std::uint64_t seed = 0;
    long sdp_solves = 0;
    long wall_steps = 0;
};

}  // namespace subiso
