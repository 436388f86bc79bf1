#include "subiso/sparse_lp.hpp"

#include "subiso/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace subiso {

double column_l1(const SparseLPInstance& inst)
{
    return inst.A.size() ? inst.A.cwiseAbs().colwise().sum().maxCoeff() : 0.0;
}

double column_l2(const SparseLPInstance& inst)
{
    return inst.A.size() ? inst.A.colwise().norm().maxCoeff() : 0.0;
}

void validate(const SparseLPInstance& inst)
{
    if (inst.A.cols() != inst.x0.size())
        throw InvalidInstance("A has " + std::to_string(inst.A.cols()) + " columns but x0 has " +
                              std::to_string(inst.x0.size()) + " entries");
    if (!(inst.delta >= 0 && inst.delta < 1))
        throw InvalidInstance("delta must lie in [0,1)");
    if ((inst.x0.array() < 0).any() || (inst.x0.array() > 1).any())
        throw InvalidInstance("x0 outside [0,1]");
    if (!inst.A.allFinite())
        throw InvalidInstance("A has non-finite entries");
    const double t = inst.norm_mode == NormMode::L1 ? column_l1(inst) : column_l2(inst);
    if (!(t > 0))
        throw InvalidInstance("column norm bound must be positive");
}

namespace {

// Alive restriction of row i, skipping rows identical to one already emitted.
template <typename Big>
OracleContract row_oracle(const SparseLPInstance& inst, double delta, const char* name, Big big)
{
    OracleContract c;
    c.delta = delta;
    c.name = name;
    c.subspace = [A = inst.A, big](const FractionalState& st, Rng&) {
        SubspaceSpec spec;
        std::map<std::vector<std::pair<int, double>>, int> seen;
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            SparseRow row;
            for (int j : st.alive)
                if (A(i, j) != 0)
                    row.entries.emplace_back(j, A(i, j));
            if (row.entries.empty() || !big(row))
                continue;
            if (!seen.emplace(row.entries, static_cast<int>(i)).second)
                continue;
            row.label = "row " + std::to_string(i);
            spec.rows.push_back(std::move(row));
        }
        return spec;
    };
    return c;
}

}  // namespace

OracleContract bf_oracle(const SparseLPInstance& inst)
{
    validate(inst);
    if (inst.norm_mode != NormMode::L1)
        throw PreconditionViolated("bf_oracle needs norm_mode L1");
    if (!(inst.delta > 0))
        throw PreconditionViolated("bf_oracle needs delta > 0");
    const double thresh = column_l1(inst) / (1.0 - inst.delta);
    return row_oracle(inst, inst.delta, "beck-fiala", [thresh](const SparseRow& r) {
        double s = 0;
        for (const auto& e : r.entries)
            s += std::abs(e.second);
        return s > thresh;
    });
}

OracleContract komlos_oracle(const SparseLPInstance& inst)
{
    validate(inst);
    if (inst.norm_mode != NormMode::L2)
        throw PreconditionViolated("komlos_oracle needs norm_mode L2");
    const double t2 = column_l2(inst);
    const double thresh = 2.0 * t2 * t2;
    return row_oracle(inst, 0.5, "komlos", [thresh](const SparseRow& r) {
        double s = 0;
        for (const auto& e : r.entries)
            s += e.second * e.second;
        return s > thresh;
    });
}

RowErrorReport verify_row_errors(const SparseLPInstance& inst, const RoundingOutcome& outcome, double komlos_constant)
{
    if (outcome.X.size() != inst.x0.size())
        throw BadShape("outcome length differs from instance");
    RowErrorReport rep;
    const Eigen::VectorXd err = (inst.A * (outcome.X - inst.x0)).cwiseAbs();
    rep.errors.assign(err.data(), err.data() + err.size());
    rep.max_error = err.size() ? err.maxCoeff() : 0.0;
    if (inst.norm_mode == NormMode::L1) {
        rep.bound = column_l1(inst) / (1.0 - inst.delta);
        rep.pass = rep.max_error <= rep.bound + 1e-6;
    } else {
        const double m = static_cast<double>(std::max<Eigen::Index>(inst.A.rows(), 2));
        rep.bound = column_l2(inst) * std::sqrt(std::log(m));
        rep.constant = rep.max_error / rep.bound;
        rep.pass = rep.constant <= komlos_constant;
    }
    return rep;
}

}  // namespace subiso
