#include <doctest.h>

#include <cmath>
#include <variant>

#include "subiso/errors.hpp"
#include "subiso/experiment.hpp"
#include "subiso/generators.hpp"
#include "subiso/io.hpp"

using namespace subiso;

TEST_CASE("block generator")
{
    const BlockInstance a = gen_block_instance(4, 2);
    REQUIRE(a.rows.size() == 2);
    CHECK(a.rows[0].entries == std::vector<std::pair<int, double>>{{0, 1.0}, {1, -1.0}});
    CHECK(a.rows[1].entries == std::vector<std::pair<int, double>>{{2, 1.0}, {3, -1.0}});
    CHECK(a.delta() == 0.5);
    CHECK((a.x0.array() == 0.5).all());

    CHECK(gen_block_instance(5, 5).rows.size() == 4);

    const BlockInstance c = gen_block_instance(6, 2);
    CHECK(c.rows.size() == 3);
    FractionalState st(c.x0);
    CHECK(orthonormal_basis(local_rows(st, c.rows), 1e-9).rows() == 3);
    CHECK(3 <= (1 - c.delta()) * 6 + 1e-12);

    CHECK_THROWS_AS(gen_block_instance(6, 4), BadShape);
}

TEST_CASE("generated instances validate")
{
    for (std::uint64_t s = 0; s < 5; ++s) {
        CHECK_NOTHROW(validate(gen_sparse_lp(64, 64, 4, NormMode::L1, s)));
        CHECK_NOTHROW(validate(gen_sparse_lp(64, 64, 0, NormMode::L2, s)));
        CHECK_NOTHROW(validate(gen_makespan(4, 12, s)));
        CHECK_NOTHROW(validate(gen_makespan(5, 10, s, 3)));
        CHECK_NOTHROW(validate(gen_tree_from_graph(random_cubic_graph(12, s), s)));
        CHECK_NOTHROW(validate(gen_matching(16, "random", s)));
    }
    CHECK_NOTHROW(validate(gen_tree_from_graph(petersen_graph(), 1)));
}

TEST_CASE("makespan generator keeps oversized pairs at zero")
{
    const MakespanInstance inst = gen_makespan(4, 12, 3);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 12; ++j) {
            CHECK(inst.p[0](i, j) >= 0.2);
            CHECK(inst.p[0](i, j) <= 1.0);
            if (inst.x0(i, j) > 0)
                CHECK(inst.p[0](i, j) <= inst.T[0]);
        }
}

TEST_CASE("small named instances")
{
    const BipartiteMatchingInstance m = gen_matching(2, "cycle", 0);
    CHECK(m.edges.size() == 4);
    for (const MatchEdge& e : m.edges)
        CHECK(e.x0 == 0.5);

    const DegreeTreeInstance t = gen_tree_cycle(5);
    CHECK(t.graph.edges.size() == 5);
    CHECK((t.x0.array() == 0.8).all());
    CHECK_NOTHROW(validate(t));

    const Graph p = petersen_graph();
    std::vector<int> deg(10, 0);
    for (const Edge& e : p.edges) {
        ++deg[static_cast<std::size_t>(e.u)];
        ++deg[static_cast<std::size_t>(e.v)];
    }
    CHECK(p.edges.size() == 15);
    for (int d : deg)
        CHECK(d == 3);
}

TEST_CASE("instance json round trips")
{
    const std::vector<Instance> all = {
        gen_trivial_instance(5, 0.3),        gen_block_instance(8, 4),
        gen_sparse_lp(6, 7, 2, NormMode::L1, 2), gen_sparse_lp(6, 7, 0, NormMode::L2, 2),
        gen_makespan(3, 5, 4, 2),            gen_tree_cycle(6),
        gen_tree_from_graph(petersen_graph(), 5), gen_matching(4, "random", 6),
    };
    for (const Instance& inst : all) {
        const nlohmann::json j = to_json(inst);
        CHECK(j.at("schema") == "subiso/1");
        const Instance back = instance_from_json(j);
        CHECK(instance_kind(back) == instance_kind(inst));
        CHECK(to_json(back) == j);
        const Problem a = make_problem(inst), b = make_problem(back);
        CHECK(a.x0 == b.x0);
        CHECK(a.delta == b.delta);
    }
}

TEST_CASE("outcome json round trip")
{
    const Problem pr = make_problem(gen_tree_cycle(5));
    RoundParams p;
    p.seed = 77;
    const RoundingOutcome o = subiso_round(pr.x0, pr.oracle, p);
    const RoundingOutcome back = outcome_from_json(outcome_to_json(o));
    CHECK(back.X == o.X);
    CHECK(back.seed == o.seed);
    REQUIRE(back.trace.size() == o.trace.size());
    for (std::size_t k = 0; k < o.trace.size(); ++k) {
        CHECK(back.trace[k].gamma == o.trace[k].gamma);
        CHECK(back.trace[k].frozen == o.trace[k].frozen);
        CHECK(back.trace[k].note == o.trace[k].note);
    }
    CHECK(pr.verify(back).pass);
}

TEST_CASE("generator specs")
{
    CHECK(instance_kind(generate_instance({{"family", "block"}, {"n", 8}, {"t", 2}})) == "block");
    CHECK(instance_kind(generate_instance({{"family", "tree"}, {"shape", "cycle"}, {"length", 4}})) == "tree");
    CHECK_THROWS_AS(generate_instance({{"family", "nope"}}), BadShape);
    CHECK_THROWS_AS(generate_instance({{"family", "block"}, {"n", 6}, {"t", 4}}), BadShape);
    RoundParams p;
    CHECK_THROWS_AS(apply_mode(p, "sideways"), BadShape);
    apply_mode(p, "faithful");
    CHECK(p.gamma_mode == GammaMode::faithful);
}

TEST_CASE("report arithmetic")
{
    const Problem pr = make_problem(gen_trivial_instance(6, 0.3));
    ExperimentConfig cfg;
    cfg.runs = 500;
    cfg.root_seed = 4;
    cfg.functionals = {{"ones", Eigen::VectorXd::Ones(6)}};
    cfg.random_functionals = 2;
    const ExperimentResult res = run_experiment(pr, cfg);
    CHECK(res.pass());
    REQUIRE(res.report.functionals.size() == 3);
    for (const FunctionalStats& s : res.report.functionals) {
        CHECK(s.beta_hat * s.bernstein_variance == doctest::Approx(s.variance).epsilon(1e-12));
        CHECK(s.beta_hat >= 0);
        for (std::size_t k = 1; k < s.tails.size(); ++k) {
            CHECK(s.tails[k].upper <= s.tails[k - 1].upper);
            CHECK(s.tails[k].lower <= s.tails[k - 1].lower);
        }
    }
    // Random functionals have unit norm.
    for (std::size_t f = 1; f < 3; ++f)
        CHECK(res.report.functionals[f].id.rfind("random", 0) == 0);
    for (const Functional& f : random_functionals(3, 6, 9))
        CHECK(f.a.norm() == doctest::Approx(1.0));

    // Recompute mean and variance of the all-ones functional from the raw values.
    double sum = 0, ss = 0;
    for (int r = 0; r < 500; ++r)
        sum += res.values[static_cast<std::size_t>(r) * 3];
    const double mean = sum / 500;
    for (int r = 0; r < 500; ++r)
        ss += std::pow(res.values[static_cast<std::size_t>(r) * 3] - mean, 2);
    CHECK(res.report.functionals[0].mean == doctest::Approx(mean));
    CHECK(res.report.functionals[0].variance == doctest::Approx(ss / 499));
    CHECK(res.report.functionals[0].bernstein_variance == doctest::Approx(6 * 0.21));
    CHECK(res.report.beta == doctest::Approx(40));
}

TEST_CASE("replay is bit identical and thread count does not matter")
{
    const Problem pr = make_problem(gen_makespan(3, 6, 2));
    ExperimentConfig cfg;
    cfg.runs = 60;
    cfg.root_seed = 99;
    cfg.random_functionals = 3;
    const std::string a = experiment_csv(run_experiment(pr, cfg));
    const std::string b = experiment_csv(run_experiment(pr, cfg));
    cfg.threads = 3;
    const std::string c = experiment_csv(run_experiment(pr, cfg));
    CHECK(a == b);
    CHECK(a == c);
    CHECK(a.rfind("run,seed,functional_id,value,mean_pred\n", 0) == 0);
    cfg.root_seed = 100;
    CHECK(experiment_csv(run_experiment(pr, cfg)) != a);
}

TEST_CASE("failing runs carry their seed")
{
    // 0.5 +- 0.2 never lands on the boundary, so every run reaches a second step.
    Problem pr = make_problem(gen_trivial_instance(3, 0.5));
    pr.x0 << 0.2, 0.5, 0.7;
    pr.oracle.subspace = [](const FractionalState& st, Rng&) {
        if (st.iteration >= 1)
            throw InvalidInstance("boom");
        return SubspaceSpec{};
    };
    ExperimentConfig cfg;
    cfg.runs = 5;
    cfg.root_seed = 7;
    try {
        run_experiment(pr, cfg);
        FAIL("expected a run failure");
    } catch (const RunFailure& e) {
        CHECK(e.run == 0);
        CHECK(e.seed == derive_seed(7, 0));
    }
}

TEST_CASE("guarantee failures are counted")
{
    Problem pr = make_problem(gen_trivial_instance(4, 0.5));
    pr.verify = [](const RoundingOutcome& o) { return Verdict{o.X[0] == 0, {{"x0", o.X[0]}}}; };
    ExperimentConfig cfg;
    cfg.runs = 200;
    const ExperimentResult res = run_experiment(pr, cfg);
    CHECK_FALSE(res.pass());
    CHECK(res.guarantee_failures > 50);
    CHECK(res.guarantee_failures < 150);
    CHECK(res.first_failure.at("x0") == 1.0);
}
