#pragma once

#include <Eigen/Dense>

namespace subiso {

struct TailBound {
    double value = 1;
    bool degenerate = false;  // zero variance with t > 0: the deviation is impossible
};

// exp(-(t^2/beta) / (2 (sum a_i^2 (x_i - x_i^2) + M t / 3))), M = max |a_i|.
TailBound bernstein_tail_bound(const Eigen::VectorXd& a, const Eigen::VectorXd& x, double t, double beta);

// sum a_i^2 x_i (1 - x_i)
double bernstein_variance(const Eigen::VectorXd& a, const Eigen::VectorXd& x);

}  // namespace subiso
