#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "subiso/types.hpp"

namespace subiso {

struct MakespanInstance {
    int m = 0;
    int r = 0;
    int q = 1;
    std::vector<Eigen::MatrixXd> p;  // q matrices, m x r
    std::vector<double> T;           // per resource
    Eigen::MatrixXd x0;              // m x r, columns sum to 1
    double delta = 0.25;
};

// Rounding variables are the support pairs (i, j) of x0, in column-major order.
struct MakespanModel {
    std::vector<std::pair<int, int>> vars;
    std::vector<std::vector<int>> by_machine;
    std::vector<std::vector<int>> by_job;
    double p_max = 0;
};

void validate(const MakespanInstance& inst);
MakespanModel make_model(const MakespanInstance& inst);
Eigen::VectorXd initial_point(const MakespanInstance& inst, const MakespanModel& model);

double machine_excess(const FractionalState& state, const MakespanModel& model, int i);

// Load rows (all resources) of machines with excess above q/(1-2 delta), and
// assignment rows of jobs not yet integrally assigned.
OracleContract lst_oracle(const MakespanInstance& inst);

struct LoadReport {
    Eigen::MatrixXd load;       // m x q
    Eigen::MatrixXd fractional; // m x q
    double p_max = 0;
    double bound = 0;           // q p_max / (1 - 2 delta)
    double max_excess = 0;      // max over (i,h) of load - fractional
    bool interpreted = false;   // q > 1 protection rule
    bool pass = false;
};

LoadReport verify_loads(const MakespanInstance& inst, const RoundingOutcome& outcome);

}  // namespace subiso
