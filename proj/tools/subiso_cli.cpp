#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "subiso/covariance.hpp"
#include "subiso/errors.hpp"
#include "subiso/experiment.hpp"
#include "subiso/io.hpp"

using nlohmann::json;
using namespace subiso;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kInputError = 2;

// Errors caused by the input files rather than by the rounding or its outcome.
bool is_input_error(const Error& e)
{
    const std::string& k = e.kind();
    return k == "InvalidInstance" || k == "BadShape" || k == "PreconditionViolated" || k == "NotInPolytope" ||
           k == "Infeasible";
}

void emit(const json& j, const std::string& out)
{
    const std::string text = j.dump(2) + "\n";
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_text(out, text);
}

int cmd_round(const std::string& path, std::uint64_t seed, std::optional<double> delta, const std::string& mode,
              const std::string& out, bool trace)
{
    const Problem pr = make_problem(instance_from_json(read_json(path)), delta);
    RoundParams p;
    apply_mode(p, mode);
    if (pr.step_mode == StepMode::deterministic)
        p.step_mode = StepMode::deterministic;
    p.seed = seed;
    p.record_trace = trace;
    const RoundingOutcome o = subiso_round(pr.x0, pr.oracle, p);
    json j = outcome_to_json(o);
    const Verdict v = pr.verify(o);
    j["verdict"] = {{"pass", v.pass}, {"report", v.report}};
    emit(j, out);
    return v.pass ? kPass : kFail;
}

int cmd_verify(const std::string& inst_path, const std::string& outcome_path)
{
    const Problem pr = make_problem(instance_from_json(read_json(inst_path)));
    const RoundingOutcome o = outcome_from_json(read_json(outcome_path));
    if (o.X.size() != pr.x0.size())
        throw BadShape("outcome has " + std::to_string(o.X.size()) + " coordinates, instance has " +
                       std::to_string(pr.x0.size()));
    const Verdict v = pr.verify(o);
    emit({{"schema", "subiso/1"}, {"kind", pr.kind}, {"pass", v.pass}, {"report", v.report}}, "-");
    return v.pass ? kPass : kFail;
}

int cmd_bench(const std::string& config_path, int threads, const std::string& csv, const std::string& report)
{
    const json cfg = read_json(config_path);
    Instance inst = cfg.contains("instance")
                        ? (cfg["instance"].is_string() ? instance_from_json(read_json(cfg["instance"].get<std::string>()))
                                                       : instance_from_json(cfg["instance"]))
                        : generate_instance(cfg.at("generator"));
    std::optional<double> delta;
    if (cfg.contains("delta"))
        delta = cfg["delta"].get<double>();
    const Problem pr = make_problem(inst, delta);

    ExperimentConfig ec;
    ec.runs = cfg.value("runs", 1000);
    ec.root_seed = cfg.value("seed", std::uint64_t{1});
    ec.random_functionals = cfg.value("random_functionals", 0);
    ec.tail_points = cfg.value("tail_points", 10);
    ec.threads = threads > 0 ? threads : cfg.value("threads", 1);
    ec.params.record_trace = false;
    apply_mode(ec.params, cfg.value("mode", "boundary"));
    if (cfg.contains("functionals")) {
        int k = 0;
        for (const json& f : cfg["functionals"]) {
            if (f.is_string() && f.get<std::string>() == "ones") {
                ec.functionals.push_back({"ones", Eigen::VectorXd::Ones(pr.x0.size())});
                continue;
            }
            const auto a = f.get<std::vector<double>>();
            ec.functionals.push_back(
                {"f" + std::to_string(k++), Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()))});
        }
    }
    const ExperimentResult res = run_experiment(pr, ec);

    json rep = report_to_json(res);
    rep["kind"] = pr.kind;
    rep["seed"] = ec.root_seed;
    const std::string csv_path = !csv.empty() ? csv : cfg.value("csv", "");
    const std::string report_path = !report.empty() ? report : cfg.value("report", "");
    if (!csv_path.empty())
        write_text(csv_path, experiment_csv(res));
    emit(rep, report_path.empty() ? "-" : report_path);
    if (!report_path.empty())
        std::cout << "report written to " << report_path << "\n";
    return res.pass() && res.report.tails_within ? kPass : kFail;
}

int cmd_cert_check(const std::string& path, double tol)
{
    const auto [cert, W] = certificate_from_json(read_json(path));
    const CheckReport r = verify_certificate(cert, W, tol);
    const Residuals& s = r.residuals;
    emit({{"schema", "subiso/1"},
          {"pass", r.pass()},
          {"psd", r.psd},
          {"diagonal", r.diagonal},
          {"trace", r.trace},
          {"subisotropy", r.subisotropy},
          {"orthogonality", r.orthogonality},
          {"residuals",
           {{"min_eig_u", s.min_eig_u},
            {"min_eig_subiso", s.min_eig_subiso},
            {"trace_slack", s.trace_slack},
            {"max_orthogonality", s.max_orthogonality},
            {"max_diag_excess", s.max_diag_excess}}}},
         "-");
    return r.pass() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Randomized iterated rounding via sub-isotropic random walks"};
    app.require_subcommand(1);

    std::string inst_path, outcome_path, out, mode = "boundary", config_path, csv, report, family;
    std::uint64_t seed = 0;
    double delta_arg = -1, tol = 1e-7;
    bool no_trace = false;
    int threads = 0;

    auto* round = app.add_subcommand("round", "Round one instance and print the outcome JSON");
    round->add_option("instance", inst_path, "Instance JSON")->required()->check(CLI::ExistingFile);
    round->add_option("--seed", seed, "Run seed");
    round->add_option("--delta", delta_arg, "Override the instance slack");
    round->add_option("--mode", mode, "boundary, faithful, deterministic or energy");
    round->add_option("--out", out, "Write the outcome here instead of stdout");
    round->add_flag("--no-trace", no_trace, "Omit the per-iteration trace");

    auto* verify = app.add_subcommand("verify", "Check an outcome against its instance's guarantee");
    verify->add_option("instance", inst_path, "Instance JSON")->required()->check(CLI::ExistingFile);
    verify->add_option("outcome", outcome_path, "Outcome JSON")->required()->check(CLI::ExistingFile);

    auto* bench = app.add_subcommand("bench", "Run a Monte-Carlo experiment from a config JSON");
    bench->add_option("config", config_path, "Experiment config JSON")->required()->check(CLI::ExistingFile);
    bench->add_option("--threads", threads, "Cap on worker threads");
    bench->add_option("--csv", csv, "Raw CSV output path");
    bench->add_option("--report", report, "Report JSON output path");

    json gen_spec = json::object();
    auto* gen = app.add_subcommand("gen", "Generate an instance");
    gen->add_option("family", family, "trivial, block, sparse_lp, makespan, tree or matching")->required();
    int n = -1, t = -1, m = -1, r = -1, q = -1, col_sum = -1, length = -1, combos = -1, perms = -1, paths = -1;
    double value = -1;
    std::string norm, shape;
    gen->add_option("--n", n, "Size (coordinates, vertices or vertices per side)");
    gen->add_option("--t", t, "Block size");
    gen->add_option("--m", m, "Rows or machines");
    gen->add_option("--r", r, "Jobs");
    gen->add_option("--q", q, "Resources");
    gen->add_option("--col-sum", col_sum, "Ones per column (sparse_lp l1)");
    gen->add_option("--norm", norm, "l1 or l2 (sparse_lp)");
    gen->add_option("--shape", shape, "tree: cycle, petersen, cubic; matching: random, cycle");
    gen->add_option("--length", length, "Cycle length (tree)");
    gen->add_option("--combos", combos, "Integral assignments averaged (makespan)");
    gen->add_option("--perms", perms, "Permutations averaged (matching)");
    gen->add_option("--paths", paths, "Hamiltonian paths averaged (tree)");
    gen->add_option("--value", value, "Coordinate value (trivial)");
    gen->add_option("--seed", seed, "Generator seed");
    gen->add_option("--delta", delta_arg, "Slack stored in the instance");
    gen->add_option("--out", out, "Write the instance here instead of stdout");

    auto* cert = app.add_subcommand("cert-check", "Verify a covariance certificate");
    cert->add_option("certificate", inst_path, "Certificate JSON")->required()->check(CLI::ExistingFile);
    cert->add_option("--tol", tol, "Residual tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kPass : kInputError;
    }

    const std::optional<double> delta = delta_arg >= 0 ? std::optional<double>(delta_arg) : std::nullopt;
    try {
        if (*round)
            return cmd_round(inst_path, seed, delta, mode, out, !no_trace);
        if (*verify)
            return cmd_verify(inst_path, outcome_path);
        if (*bench)
            return cmd_bench(config_path, threads, csv, report);
        if (*cert)
            return cmd_cert_check(inst_path, tol);
        if (*gen) {
            gen_spec["family"] = family;
            gen_spec["seed"] = seed;
            auto put = [&](const char* key, auto v, bool set) {
                if (set)
                    gen_spec[key] = v;
            };
            put("n", n, n >= 0);
            put("t", t, t >= 0);
            put("m", m, m >= 0);
            put("r", r, r >= 0);
            put("q", q, q >= 0);
            put("col_sum", col_sum, col_sum >= 0);
            put("length", length, length >= 0);
            put("combos", combos, combos >= 0);
            put("perms", perms, perms >= 0);
            put("paths", paths, paths >= 0);
            put("value", value, value >= 0);
            put("norm", norm, !norm.empty());
            put("shape", shape, !shape.empty());
            put("delta", delta_arg, delta.has_value());
            emit(to_json(generate_instance(gen_spec)), out);
            return kPass;
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return is_input_error(e) ? kInputError : kFail;
    } catch (const json::exception& e) {
        std::cerr << "InvalidInstance: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
