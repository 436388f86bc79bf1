#include "subiso/makespan.hpp"

#include "subiso/errors.hpp"

#include <algorithm>
#include <cmath>

namespace subiso {

void validate(const MakespanInstance& inst)
{
    if (inst.m <= 0 || inst.r <= 0 || inst.q <= 0)
        throw InvalidInstance("m, r and q must be positive");
    if (static_cast<int>(inst.p.size()) != inst.q || static_cast<int>(inst.T.size()) != inst.q)
        throw InvalidInstance("need one size matrix and one target per resource");
    if (inst.x0.rows() != inst.m || inst.x0.cols() != inst.r)
        throw InvalidInstance("x0 must be m x r");
    if (!(inst.delta >= 0 && inst.delta < 0.5))
        throw InvalidInstance("delta must lie in [0,1/2)");
    for (int h = 0; h < inst.q; ++h) {
        const Eigen::MatrixXd& p = inst.p[static_cast<std::size_t>(h)];
        if (p.rows() != inst.m || p.cols() != inst.r || (p.array() < 0).any())
            throw InvalidInstance("sizes must be nonnegative m x r matrices");
    }
    for (int j = 0; j < inst.r; ++j) {
        double s = 0;
        for (int i = 0; i < inst.m; ++i) {
            const double v = inst.x0(i, j);
            if (v < 0 || v > 1)
                throw InvalidInstance("x0 outside [0,1]");
            s += v;
            if (v > 0)
                for (int h = 0; h < inst.q; ++h)
                    if (inst.p[static_cast<std::size_t>(h)](i, j) > inst.T[static_cast<std::size_t>(h)])
                        throw InvalidInstance("job " + std::to_string(j) + " uses machine " + std::to_string(i) +
                                              " where its size exceeds T");
        }
        if (std::abs(s - 1) > 1e-9)
            throw InvalidInstance("job " + std::to_string(j) + " is not fully assigned");
    }
}

MakespanModel make_model(const MakespanInstance& inst)
{
    MakespanModel mdl;
    mdl.by_machine.resize(static_cast<std::size_t>(inst.m));
    mdl.by_job.resize(static_cast<std::size_t>(inst.r));
    for (int j = 0; j < inst.r; ++j)
        for (int i = 0; i < inst.m; ++i)
            if (inst.x0(i, j) > 0) {
                const int v = static_cast<int>(mdl.vars.size());
                mdl.vars.emplace_back(i, j);
                mdl.by_machine[static_cast<std::size_t>(i)].push_back(v);
                mdl.by_job[static_cast<std::size_t>(j)].push_back(v);
                for (const Eigen::MatrixXd& p : inst.p)
                    mdl.p_max = std::max(mdl.p_max, p(i, j));
            }
    return mdl;
}

Eigen::VectorXd initial_point(const MakespanInstance& inst, const MakespanModel& model)
{
    Eigen::VectorXd x(static_cast<Eigen::Index>(model.vars.size()));
    for (std::size_t v = 0; v < model.vars.size(); ++v)
        x[static_cast<Eigen::Index>(v)] = inst.x0(model.vars[v].first, model.vars[v].second);
    return x;
}

double machine_excess(const FractionalState& state, const MakespanModel& model, int i)
{
    double e = 0;
    for (int v : model.by_machine.at(static_cast<std::size_t>(i)))
        if (state.is_alive(v))
            e += 1 - state.x[v];
    return e;
}

OracleContract lst_oracle(const MakespanInstance& inst)
{
    validate(inst);
    MakespanModel mdl = make_model(inst);
    OracleContract c;
    c.delta = inst.delta;
    c.name = "makespan";
    const double thresh = inst.q / (1.0 - 2.0 * inst.delta);
    c.subspace = [inst, mdl = std::move(mdl), thresh](const FractionalState& st, Rng&) {
        SubspaceSpec spec;
        const double scale = mdl.p_max > 0 ? 1.0 / mdl.p_max : 1.0;
        for (int i = 0; i < inst.m; ++i) {
            if (!(machine_excess(st, mdl, i) > thresh))
                continue;
            for (int h = 0; h < inst.q; ++h) {
                SparseRow row;
                for (int v : mdl.by_machine[static_cast<std::size_t>(i)])
                    if (st.is_alive(v)) {
                        const double pv = inst.p[static_cast<std::size_t>(h)](i, mdl.vars[static_cast<std::size_t>(v)].second);
                        if (pv != 0)
                            row.entries.emplace_back(v, pv * scale);
                    }
                if (row.entries.empty())
                    continue;
                row.label = "load m" + std::to_string(i) + (inst.q > 1 ? " r" + std::to_string(h) + " (interpreted)" : "");
                spec.rows.push_back(std::move(row));
            }
        }
        for (int j = 0; j < inst.r; ++j) {
            SparseRow row;
            for (int v : mdl.by_job[static_cast<std::size_t>(j)])
                if (st.is_alive(v))
                    row.entries.emplace_back(v, 1.0);
            if (row.entries.empty())
                continue;
            row.label = "assign j" + std::to_string(j);
            spec.rows.push_back(std::move(row));
        }
        return spec;
    };
    return c;
}

LoadReport verify_loads(const MakespanInstance& inst, const RoundingOutcome& outcome)
{
    const MakespanModel mdl = make_model(inst);
    if (outcome.X.size() != static_cast<Eigen::Index>(mdl.vars.size()))
        throw BadShape("outcome length differs from the number of support pairs");
    for (int j = 0; j < inst.r; ++j) {
        double s = 0;
        for (int v : mdl.by_job[static_cast<std::size_t>(j)]) {
            const double xv = outcome.X[v];
            if (xv != 0 && xv != 1)
                throw NotAnAssignment("variable for job " + std::to_string(j) + " is fractional");
            s += xv;
        }
        if (s != 1)
            throw NotAnAssignment("job " + std::to_string(j) + " assigned " + std::to_string(s) + " times");
    }
    LoadReport rep;
    rep.load = Eigen::MatrixXd::Zero(inst.m, inst.q);
    rep.fractional = Eigen::MatrixXd::Zero(inst.m, inst.q);
    for (std::size_t v = 0; v < mdl.vars.size(); ++v) {
        const auto [i, j] = mdl.vars[v];
        for (int h = 0; h < inst.q; ++h) {
            const double pv = inst.p[static_cast<std::size_t>(h)](i, j);
            rep.load(i, h) += pv * outcome.X[static_cast<Eigen::Index>(v)];
            rep.fractional(i, h) += pv * inst.x0(i, j);
        }
    }
    rep.p_max = mdl.p_max;
    rep.bound = inst.q * mdl.p_max / (1.0 - 2.0 * inst.delta);
    rep.max_excess = (rep.load - rep.fractional).maxCoeff();
    rep.interpreted = inst.q > 1;
    rep.pass = rep.max_excess <= rep.bound + 1e-6;
    return rep;
}

}  // namespace subiso
