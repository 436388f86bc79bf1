#pragma once

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "subiso/generators.hpp"
#include "subiso/walk.hpp"

namespace subiso {

using Instance = std::variant<TrivialInstance, BlockInstance, SparseLPInstance, MakespanInstance, DegreeTreeInstance,
                              BipartiteMatchingInstance>;

// "trivial", "block", "sparse_lp", "makespan", "tree" or "matching".
std::string instance_kind(const Instance& inst);

nlohmann::json to_json(const Instance& inst);
// Uses the "kind" field when present, otherwise the family's distinguishing keys.
Instance instance_from_json(const nlohmann::json& j);

nlohmann::json outcome_to_json(const RoundingOutcome& out);
RoundingOutcome outcome_from_json(const nlohmann::json& j);

// Builds an instance from {"family": ..., shape keys...}; the keys match the
// command-line generator flags.
Instance generate_instance(const nlohmann::json& spec);

// "boundary", "faithful", "deterministic" or "energy".
void apply_mode(RoundParams& params, const std::string& mode);

nlohmann::json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

struct Verdict {
    bool pass = false;
    nlohmann::json report;
};

// An instance bound to its oracle, start point and per-run verifier.
struct Problem {
    std::string kind;
    Eigen::VectorXd x0;
    OracleContract oracle;
    double delta = 0.5;  // slack of the guarantee, used for beta = 20/delta
    StepMode step_mode = StepMode::random;
    std::function<Verdict(const RoundingOutcome&)> verify;
};

// delta overrides the instance's slack where the family has one.
Problem make_problem(const Instance& inst, std::optional<double> delta = std::nullopt);

}  // namespace subiso
