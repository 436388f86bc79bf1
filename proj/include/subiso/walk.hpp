#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>

#include "subiso/covariance.hpp"
#include "subiso/linalg.hpp"
#include "subiso/rng.hpp"
#include "subiso/types.hpp"

namespace subiso {

enum class GammaMode { boundary, faithful };
enum class StepMode { random, deterministic };

struct RoundParams {
    std::optional<double> a;
    std::optional<double> eta;
    GammaMode gamma_mode = GammaMode::boundary;
    // deterministic: classical iterated rounding, one-sided maximal null-space steps; delta = 0 allowed.
    StepMode step_mode = StepMode::random;
    bool energy_mode = false;
    double sdp_tol = 1e-7;
    double rank_tol = 1e-9;
    double integrality_tol = 1e-9;
    int sdp_max_iters = 10000;
    int max_redraws = 32;
    std::uint64_t seed = 0;
    bool record_trace = true;
};

// y = root * r for r uniform in {-1,+1}^n, root = U^{1/2}.
template <typename Derived>
VectorX<typename Derived::Scalar> sample_direction(const Eigen::MatrixBase<Derived>& root, Rng& rng)
{
    using Scalar = typename Derived::Scalar;
    VectorX<Scalar> r(root.cols());
    for (Eigen::Index i = 0; i < r.size(); ++i)
        r[i] = Scalar(rng.sign());
    return root * r;
}

Eigen::VectorXd sample_direction(const CovarianceCertificate& cert, Rng& rng);

// Largest g in (0, cap] with x +- g*y inside [0,1]^n. y is global and must vanish on frozen coordinates.
double max_step_scale(const FractionalState& state, const Eigen::VectorXd& y, double gamma_cap);

RoundingOutcome subiso_round(const Eigen::VectorXd& x0, const OracleContract& oracle, const RoundParams& params = {});

// Adds x restricted to the alive coordinates as an extra row while n_k >= 4/delta.
RoundingOutcome subiso_round_energy_mode(const Eigen::VectorXd& x0, const OracleContract& oracle,
                                         RoundParams params = {});

OracleContract trivial_oracle(double delta = 0.5);

// Fixed linear constraints, restricted to alive coordinates at every call.
OracleContract rows_oracle(std::vector<SparseRow> rows, double delta);

// Dense matrix of the spec rows over the alive coordinates of state.
Eigen::MatrixXd local_rows(const FractionalState& state, const std::vector<SparseRow>& rows);

}  // namespace subiso
