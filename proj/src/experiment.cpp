#include "subiso/experiment.hpp"

#include "subiso/bernstein.hpp"
#include "subiso/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace subiso {

using nlohmann::json;

std::vector<Functional> random_functionals(int count, int n, std::uint64_t seed)
{
    std::vector<Functional> out;
    for (int k = 0; k < count; ++k) {
        Rng rng(seed, static_cast<std::uint64_t>(k));
        Eigen::VectorXd a(n);
        for (int i = 0; i < n; ++i)
            a[i] = rng.normal();
        if (a.norm() > 0)
            a.normalize();
        out.push_back({"random" + std::to_string(k), a});
    }
    return out;
}

ConcentrationReport concentration_report(const std::vector<Functional>& functionals, const Eigen::VectorXd& x0,
                                         const std::vector<double>& values, int runs, double delta, int tail_points)
{
    ConcentrationReport rep;
    rep.runs = runs;
    rep.delta = delta;
    rep.beta = delta > 0 ? 20 / delta : std::numeric_limits<double>::infinity();
    const std::size_t nf = functionals.size();
    const double N = runs;
    for (std::size_t f = 0; f < nf; ++f) {
        const Functional& fn = functionals[f];
        FunctionalStats s;
        s.id = fn.id;
        s.mean_pred = fn.a.dot(x0);
        double sum = 0;
        for (int r = 0; r < runs; ++r)
            sum += values[static_cast<std::size_t>(r) * nf + f];
        s.mean = sum / N;
        double ss = 0;
        for (int r = 0; r < runs; ++r) {
            const double d = values[static_cast<std::size_t>(r) * nf + f] - s.mean;
            ss += d * d;
        }
        s.variance = runs > 1 ? ss / (N - 1) : 0.0;
        s.mean_stderr = std::sqrt(s.variance / N);
        s.bernstein_variance = bernstein_variance(fn.a, x0);
        s.beta_hat = s.bernstein_variance > 0 ? s.variance / s.bernstein_variance : 0.0;

        const double m = fn.a.size() ? fn.a.cwiseAbs().maxCoeff() : 0.0;
        const double sd = std::sqrt(s.bernstein_variance);
        const double tmax = sd > 0 ? 5 * sd : m;
        for (int k = 1; k <= tail_points && tmax > 0; ++k) {
            TailPoint p;
            p.t = tmax * k / tail_points;
            for (int r = 0; r < runs; ++r) {
                const double d = values[static_cast<std::size_t>(r) * nf + f] - s.mean_pred;
                p.upper += d >= p.t;
                p.lower += d <= -p.t;
            }
            p.bound = delta > 0 ? std::min(1.0, bernstein_tail_bound(fn.a, x0, p.t, rep.beta).value) : 1.0;
            p.sigma = std::sqrt(p.bound * (1 - p.bound) / N);
            const double limit = p.bound + 3 * p.sigma;
            p.within = p.upper / N <= limit && p.lower / N <= limit;
            s.tails_within = s.tails_within && p.within;
            s.tails.push_back(p);
        }
        rep.tails_within = rep.tails_within && s.tails_within;
        rep.functionals.push_back(std::move(s));
    }
    return rep;
}

ExperimentResult run_experiment(const Problem& problem, const ExperimentConfig& config)
{
    if (config.runs < 1)
        throw PreconditionViolated("an experiment needs at least one run");
    const int n = static_cast<int>(problem.x0.size());
    std::vector<Functional> fns = config.functionals;
    for (const Functional& f : fns)
        if (f.a.size() != n)
            throw BadShape("functional '" + f.id + "' has the wrong length");
    const std::vector<Functional> extra =
        random_functionals(config.random_functionals, n, derive_seed(config.root_seed, ~std::uint64_t{0}));
    fns.insert(fns.end(), extra.begin(), extra.end());

    ExperimentResult res;
    const std::size_t runs = static_cast<std::size_t>(config.runs), nf = fns.size();
    res.values.assign(runs * nf, 0.0);
    res.seeds.resize(runs);
    if (config.keep_outcomes)
        res.outcomes.resize(runs);
    std::vector<char> passed(runs, 1);
    std::vector<json> reports(runs);
    std::vector<std::string> errors(runs);
    std::vector<Eigen::VectorXd> xs(runs);

    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    auto worker = [&] {
        for (std::size_t k; !abort && (k = next++) < runs;) {
            RoundParams p = config.params;
            p.seed = derive_seed(config.root_seed, k);
            p.step_mode = problem.step_mode == StepMode::deterministic ? StepMode::deterministic : p.step_mode;
            res.seeds[k] = p.seed;
            try {
                const RoundingOutcome out = subiso_round(problem.x0, problem.oracle, p);
                const Verdict v = problem.verify(out);
                passed[k] = v.pass;
                if (!v.pass)
                    reports[k] = v.report;
                for (std::size_t f = 0; f < nf; ++f)
                    res.values[k * nf + f] = fns[f].a.dot(out.X);
                xs[k] = out.X;
            } catch (const std::exception& e) {
                errors[k] = e.what();
                abort = true;
            }
        }
    };
    const int threads = std::max(1, std::min<int>(config.threads, config.runs));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (std::thread& t : pool)
            t.join();
    }
    for (std::size_t k = 0; k < runs; ++k)
        if (!errors[k].empty())
            throw RunFailure("run " + std::to_string(k) + " (seed " + std::to_string(res.seeds[k]) + "): " + errors[k],
                             res.seeds[k], static_cast<int>(k));

    res.coordinate_mean = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < runs; ++k) {
        res.coordinate_mean += xs[k];
        if (!passed[k]) {
            if (res.guarantee_failures == 0) {
                res.first_failed_seed = res.seeds[k];
                res.first_failure = reports[k];
            }
            ++res.guarantee_failures;
        }
    }
    res.coordinate_mean /= static_cast<double>(runs);
    if (config.keep_outcomes)
        res.outcomes = std::move(xs);
    res.report = concentration_report(fns, problem.x0, res.values, config.runs, problem.delta, config.tail_points);
    return res;
}

std::string experiment_csv(const ExperimentResult& result)
{
    std::ostringstream os;
    os.precision(17);
    os << "run,seed,functional_id,value,mean_pred\n";
    const std::size_t nf = result.report.functionals.size();
    for (std::size_t k = 0; k < result.seeds.size(); ++k)
        for (std::size_t f = 0; f < nf; ++f)
            os << k << ',' << result.seeds[k] << ',' << result.report.functionals[f].id << ','
               << result.values[k * nf + f] << ',' << result.report.functionals[f].mean_pred << '\n';
    return os.str();
}

json report_to_json(const ExperimentResult& result)
{
    const ConcentrationReport& r = result.report;
    json fns = json::array();
    for (const FunctionalStats& s : r.functionals) {
        json tails = json::array();
        for (const TailPoint& p : s.tails)
            tails.push_back({{"t", p.t}, {"upper", p.upper}, {"lower", p.lower}, {"bound", p.bound},
                             {"sigma", p.sigma}, {"within", p.within}});
        fns.push_back({{"id", s.id},
                       {"mean", s.mean},
                       {"mean_pred", s.mean_pred},
                       {"variance", s.variance},
                       {"bernstein_variance", s.bernstein_variance},
                       {"beta_hat", s.beta_hat},
                       {"tails", tails},
                       {"tails_within", s.tails_within}});
    }
    json j = {{"schema", "subiso/1"},
              {"runs", r.runs},
              {"delta", r.delta},
              {"beta", std::isfinite(r.beta) ? json(r.beta) : json(nullptr)},
              {"guarantee_failures", result.guarantee_failures},
              {"tails_within", r.tails_within},
              {"functionals", fns}};
    if (result.guarantee_failures > 0)
        j["first_failure"] = {{"seed", result.first_failed_seed}, {"report", result.first_failure}};
    return j;
}

}  // namespace subiso
