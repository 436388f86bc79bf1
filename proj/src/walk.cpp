#include "subiso/walk.hpp"

#include "subiso/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace subiso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_rows(const std::vector<SparseRow>& a, const std::vector<SparseRow>& b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].entries != b[i].entries)
            return false;
    return true;
}

struct Step {
    double gamma = kInf;
    int binding = -1;
};

// Box limit for x + g*y (one_sided) or x +- g*y.
Step box_step(const FractionalState& st, const Eigen::VectorXd& y, bool one_sided)
{
    Step s;
    for (int i : st.alive) {
        const double yi = y[i];
        if (yi == 0)
            continue;
        const double up = (1 - st.x[i]) / std::abs(yi), down = st.x[i] / std::abs(yi);
        const double g = one_sided ? (yi > 0 ? up : down) : std::min(up, down);
        if (g < s.gamma) {
            s.gamma = g;
            s.binding = i;
        }
    }
    return s;
}

}  // namespace

Eigen::VectorXd sample_direction(const CovarianceCertificate& cert, Rng& rng)
{
    return sample_direction(psd_sqrt(cert.U, 1e-7), rng);
}

double max_step_scale(const FractionalState& state, const Eigen::VectorXd& y, double gamma_cap)
{
    if (!(gamma_cap > 0))
        throw PreconditionViolated("gamma_cap must be positive");
    if (y.size() != state.n())
        throw BadShape("direction length differs from state");
    for (int i = 0; i < state.n(); ++i)
        if (!state.is_alive(i) && y[i] != 0)
            throw PreconditionViolated("direction moves frozen coordinate " + std::to_string(i));
    const double g = box_step(state, y, false).gamma;
    if (!(g < kInf))
        throw ZeroDirection("direction vanishes on the alive coordinates");
    return std::min(gamma_cap, g);
}

Eigen::MatrixXd local_rows(const FractionalState& state, const std::vector<SparseRow>& rows)
{
    std::vector<int> loc(static_cast<std::size_t>(state.n()), -1);
    for (int k = 0; k < state.n_alive(); ++k)
        loc[static_cast<std::size_t>(state.alive[static_cast<std::size_t>(k)])] = k;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), state.n_alive());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (const auto& [j, v] : rows[r].entries) {
            if (j < 0 || j >= state.n() || loc[static_cast<std::size_t>(j)] < 0)
                throw PreconditionViolated("row '" + rows[r].label + "' touches non-alive coordinate " +
                                           std::to_string(j));
            m(static_cast<Eigen::Index>(r), loc[static_cast<std::size_t>(j)]) += v;
        }
    return m;
}

namespace {

RoundingOutcome run(const Eigen::VectorXd& x0, const OracleContract& oracle, const RoundParams& p)
{
    const bool det = p.step_mode == StepMode::deterministic;
    const bool faithful = p.gamma_mode == GammaMode::faithful;
    const double delta = oracle.delta;
    if (det ? !(delta >= 0 && delta < 1) : !(delta > 0 && delta < 1))
        throw PreconditionViolated("oracle slack must lie in (0,1)");
    if (!oracle.subspace)
        throw PreconditionViolated("oracle has no subspace callback");

    FractionalState st(x0, p.integrality_tol);
    RoundingOutcome out;
    out.seed = p.seed;
    const int n = st.n();
    const double nd = n;
    const double limit = 64.0 * nd * (1.0 + (faithful ? 4.0 * nd * nd * nd : 0.0));
    const double cap = faithful ? 1.0 / (2.0 * std::pow(nd, 1.5)) : kInf;

    std::vector<int> cached_alive;
    std::vector<SparseRow> cached_rows;
    bool have_cert = false;
    Eigen::MatrixXd W, root;

    while (!st.alive.empty()) {
        if (static_cast<double>(st.iteration) >= limit)
            throw NonTermination("exceeded " + std::to_string(static_cast<long long>(limit)) + " iterations");

        Rng orng(p.seed, 2 * static_cast<std::uint64_t>(st.iteration) + 1);
        SubspaceSpec spec = oracle.subspace(st, orng);

        if (!spec.forced_zero.empty()) {
            IterationRecord rec;
            rec.n_alive = st.n_alive();
            rec.note = spec.note;
            for (int i : spec.forced_zero) {
                if (i < 0 || i >= n || !st.is_alive(i))
                    throw PreconditionViolated("forced zero on non-alive coordinate " + std::to_string(i));
                st.freeze(i, 0);
                rec.forced_zero.push_back(i);
            }
            if (p.record_trace)
                out.trace.push_back(std::move(rec));
            ++st.iteration;
            continue;
        }

        const int nk = st.n_alive();
        const Eigen::MatrixXd raw = local_rows(st, spec.rows);
        const Eigen::MatrixXd base = orthonormal_basis(raw, p.rank_tol);
        const double rank = static_cast<double>(base.rows());
        if (det ? rank >= nk : rank > (1.0 - delta) * nk + 1e-9) {
            std::ostringstream os;
            os << "rank " << base.rows() << " with " << nk << " alive coordinates and slack " << delta;
            throw OracleRankViolation(os.str());
        }

        const bool energy = p.energy_mode && !det && nk >= 4.0 / delta;
        const double d_eff = energy ? delta / 2 : delta;
        const bool reuse = have_cert && !energy && st.alive == cached_alive && same_rows(spec.rows, cached_rows);
        if (!reuse) {
            if (energy) {
                Eigen::MatrixXd ext(raw.rows() + 1, nk);
                ext << raw, st.alive_values().transpose();
                W = orthonormal_basis(ext, p.rank_tol);
            } else {
                W = base;
            }
            if (!det) {
                const double a = p.a.value_or(d_eff / 10), eta = p.eta.value_or(10 / (9 * d_eff));
                try {
                    const CovarianceCertificate cert =
                        find_subisotropic_covariance(W, nk, a, eta, p.sdp_tol, p.sdp_max_iters);
                    root = psd_sqrt(cert.U, p.sdp_tol);
                } catch (const NoConvergence& e) {
                    throw SdpFailure(e.what(), e.residuals);
                }
                ++out.sdp_solves;
            }
            cached_alive = st.alive;
            cached_rows = spec.rows;
            have_cert = true;
        }

        Eigen::VectorXd y;
        Rng drng(p.seed, 2 * static_cast<std::uint64_t>(st.iteration));
        if (det) {
            y = complement_basis(W, nk).col(0);
        } else {
            int draws = 0;
            for (;; ++draws) {
                if (draws >= p.max_redraws)
                    throw ZeroDirection("U^{1/2} r vanished on " + std::to_string(draws) + " draws");
                y = sample_direction(root, drng);
                if (W.rows() > 0)
                    y -= W.transpose() * (W * y);
                if (y.norm() > 1e-12)
                    break;
            }
        }
        if (W.rows() > 0 && (W * y).cwiseAbs().maxCoeff() > p.sdp_tol * y.norm())
            throw PreconditionViolated("step leaves the constraint subspace");

        Eigen::VectorXd yg = Eigen::VectorXd::Zero(n);
        for (int k = 0; k < nk; ++k)
            yg[st.alive[static_cast<std::size_t>(k)]] = y[k];

        const Step box = box_step(st, yg, det);
        double gamma = std::min(box.gamma, cap);
        if (oracle.step_limit)
            gamma = std::min(gamma, oracle.step_limit(st, yg));
        if (!(gamma > 0) || !(gamma < kInf))
            throw ZeroDirection("no admissible step length");

        const double s = det ? 1.0 : drng.sign();
        const double energy_before = energy ? st.alive_values().squaredNorm() : 0.0;
        for (int i : st.alive)
            st.x[i] = std::clamp(st.x[i] + s * gamma * yg[i], 0.0, 1.0);
        if (energy) {
            double after = 0;
            for (int i : st.alive)
                after += st.x[i] * st.x[i];
            if (after < energy_before - p.sdp_tol * std::max(1.0, energy_before))
                throw PreconditionViolated("energy decreased in energy mode");
        }

        IterationRecord rec;
        rec.n_alive = nk;
        rec.dim_w = static_cast<int>(W.rows());
        rec.gamma = gamma;
        rec.frozen = st.snap();
        rec.note = spec.note;
        if (p.record_trace)
            out.trace.push_back(std::move(rec));
        ++st.iteration;
        ++out.wall_steps;
    }
    out.X = st.x;
    return out;
}

}  // namespace

RoundingOutcome subiso_round(const Eigen::VectorXd& x0, const OracleContract& oracle, const RoundParams& params)
{
    return run(x0, oracle, params);
}

RoundingOutcome subiso_round_energy_mode(const Eigen::VectorXd& x0, const OracleContract& oracle, RoundParams params)
{
    params.energy_mode = true;
    return run(x0, oracle, params);
}

OracleContract trivial_oracle(double delta)
{
    OracleContract c;
    c.delta = delta;
    c.name = "trivial";
    c.subspace = [](const FractionalState&, Rng&) { return SubspaceSpec{}; };
    return c;
}

OracleContract rows_oracle(std::vector<SparseRow> rows, double delta)
{
    OracleContract c;
    c.delta = delta;
    c.name = "rows";
    c.subspace = [rows = std::move(rows)](const FractionalState& st, Rng&) {
        SubspaceSpec spec;
        for (const SparseRow& r : rows) {
            SparseRow local{{}, r.label};
            for (const auto& e : r.entries)
                if (st.is_alive(e.first))
                    local.entries.push_back(e);
            if (!local.entries.empty())
                spec.rows.push_back(std::move(local));
        }
        return spec;
    };
    return c;
}

}  // namespace subiso
