#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "subiso/errors.hpp"
#include "subiso/io.hpp"

namespace subiso {

struct Functional {
    std::string id;
    Eigen::VectorXd a;
};

struct ExperimentConfig {
    int runs = 1000;
    std::uint64_t root_seed = 1;
    RoundParams params;                  // seed is replaced per run
    std::vector<Functional> functionals;
    int random_functionals = 0;          // Gaussian directions scaled to unit l2 norm
    int tail_points = 10;
    int threads = 1;
    bool keep_outcomes = false;
};

struct TailPoint {
    double t = 0;
    long upper = 0;         // runs with a.X - a.x0 >= t
    long lower = 0;         // runs with a.X - a.x0 <= -t
    double bound = 0;       // bernstein_tail_bound at beta = 20/delta
    double sigma = 0;       // binomial standard error of a frequency equal to the bound
    bool within = true;     // both frequencies <= bound + 3 sigma
};

struct FunctionalStats {
    std::string id;
    double mean = 0;
    double mean_pred = 0;
    double variance = 0;             // empirical, divisor N - 1
    double bernstein_variance = 0;   // sum a_i^2 x_i (1 - x_i)
    double beta_hat = 0;             // variance / bernstein_variance
    double mean_stderr = 0;
    std::vector<TailPoint> tails;
    bool tails_within = true;
};

struct ConcentrationReport {
    int runs = 0;
    double delta = 0;
    double beta = 0;
    std::vector<FunctionalStats> functionals;
    bool tails_within = true;
};

struct ExperimentResult {
    ConcentrationReport report;
    std::vector<Eigen::VectorXd> outcomes;  // filled when keep_outcomes
    Eigen::VectorXd coordinate_mean;
    std::vector<double> values;             // run-major, one per (run, functional)
    std::vector<std::uint64_t> seeds;
    long guarantee_failures = 0;
    std::uint64_t first_failed_seed = 0;
    nlohmann::json first_failure;
    bool pass() const { return guarantee_failures == 0; }
};

// Raised when a run throws; carries the seed for replay.
class RunFailure : public Error {
public:
    RunFailure(const std::string& what, std::uint64_t seed, int run)
        : Error("RunFailure", what), seed(seed), run(run) {}
    std::uint64_t seed;
    int run;
};

std::vector<Functional> random_functionals(int count, int n, std::uint64_t seed);

ConcentrationReport concentration_report(const std::vector<Functional>& functionals, const Eigen::VectorXd& x0,
                                         const std::vector<double>& values, int runs, double delta,
                                         int tail_points = 10);

ExperimentResult run_experiment(const Problem& problem, const ExperimentConfig& config);

// Columns: run, seed, functional_id, value, mean_pred.
std::string experiment_csv(const ExperimentResult& result);
nlohmann::json report_to_json(const ExperimentResult& result);

}  // namespace subiso
