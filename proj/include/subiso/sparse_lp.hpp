#pragma once

#include <Eigen/Dense>

#include <vector>

#include "subiso/types.hpp"

namespace subiso {

enum class NormMode { L1, L2 };

struct SparseLPInstance {
    Eigen::MatrixXd A;
    Eigen::VectorXd x0;
    double delta = 0.5;
    NormMode norm_mode = NormMode::L1;
};

// Max column l1 norm (t) and max column l2 norm (t2).
double column_l1(const SparseLPInstance& inst);
double column_l2(const SparseLPInstance& inst);

void validate(const SparseLPInstance& inst);

// Rows whose l1 norm over alive coordinates exceeds t/(1-delta).
OracleContract bf_oracle(const SparseLPInstance& inst);
// Rows whose squared l2 norm over alive coordinates exceeds 2*t2^2; slack 1/2.
OracleContract komlos_oracle(const SparseLPInstance& inst);

struct RowErrorReport {
    std::vector<double> errors;
    double max_error = 0;
    double bound = 0;     // t/(1-delta) in L1 mode, t2*sqrt(ln m) in L2 mode
    double constant = 0;  // max_error / (t2 sqrt(ln m)) in L2 mode
    bool pass = false;
};

RowErrorReport verify_row_errors(const SparseLPInstance& inst, const RoundingOutcome& outcome,
                                 double komlos_constant = 4.0);

}  // namespace subiso
