#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "subiso/errors.hpp"
#include "subiso/generators.hpp"
#include "subiso/matching.hpp"
#include "subiso/walk.hpp"

using namespace subiso;

namespace {

SupportTopology path_graph(int edges)
{
    std::vector<std::pair<int, int>> ends;
    std::vector<int> ids(static_cast<std::size_t>(edges));
    for (int k = 0; k < edges; ++k)
        ends.emplace_back(k, k + 1);
    std::iota(ids.begin(), ids.end(), 0);
    return analyze_graph(edges + 1, ends, ids);
}

SupportTopology cycle_graph(int edges)
{
    std::vector<std::pair<int, int>> ends;
    std::vector<int> ids(static_cast<std::size_t>(edges));
    for (int k = 0; k < edges; ++k)
        ends.emplace_back(k, (k + 1) % edges);
    std::iota(ids.begin(), ids.end(), 0);
    return analyze_graph(edges, ends, ids);
}

SupportTopology from_edges(int n, const std::vector<std::pair<int, int>>& ends)
{
    std::vector<int> ids(ends.size());
    std::iota(ids.begin(), ids.end(), 0);
    return analyze_graph(n, ends, ids);
}

RoundParams seeded(std::uint64_t s)
{
    RoundParams p;
    p.seed = s;
    p.record_trace = false;
    return p;
}

}  // namespace

TEST_CASE("topology of a path")
{
    const SupportTopology top = path_graph(5);
    REQUIRE(top.paths.size() == 1);
    CHECK(top.paths[0].interior() == 4);
    CHECK(top.paths[0].edges.size() == 5);
    CHECK(top.d1 == 2);
    CHECK(top.d2 == 4);
    CHECK(top.d3plus == 0);
    REQUIRE(top.components.size() == 1);
    CHECK_FALSE(top.components[0].cycle);
}

TEST_CASE("topology of two triangles sharing a vertex")
{
    const SupportTopology top = from_edges(5, {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {3, 4}, {4, 0}});
    CHECK(top.d3plus == 1);
    CHECK(top.d2 == 4);
    REQUIRE(top.paths.size() == 2);
    for (const DegreePath& p : top.paths)
        CHECK(p.interior() == 2);
    // The decomposition covers every edge once.
    std::map<int, int> uses;
    for (const DegreePath& p : top.paths)
        for (int e : p.edges)
            ++uses[e];
    CHECK(uses.size() == 6);
    for (const auto& [e, k] : uses)
        CHECK(k == 1);
}

TEST_CASE("topology of an even cycle")
{
    const SupportTopology top = cycle_graph(6);
    REQUIRE(top.components.size() == 1);
    CHECK(top.components[0].cycle);
    CHECK(top.components[0].cycle_edges.size() == 6);
    CHECK(top.paths.empty());
}

TEST_CASE("short cycles and paths are left alone")
{
    Rng rng(1);
    for (int t : {1, 2, 5}) {
        CHECK(drop_plan(cycle_graph(4 * t), t, rng).edges.empty());
        CHECK(drop_plan(path_graph(4 * t), t, rng).edges.empty());
    }
}

TEST_CASE("path drops follow the offset rule")
{
    for (int t : {1, 2, 3}) {
        const int period = 4 * t;
        std::map<int, int> by_offset_8t, by_offset_8t1;
        for (std::uint64_t s = 0; s < 400; ++s) {
            Rng rng(s);
            const DropPlan a = drop_plan(path_graph(2 * period), t, rng);
            REQUIRE(!a.edges.empty());
            by_offset_8t[a.edges[0] + 1] = static_cast<int>(a.edges.size());
            Rng rng2(s);
            const DropPlan b = drop_plan(path_graph(2 * period + 1), t, rng2);
            by_offset_8t1[b.edges[0] + 1] = static_cast<int>(b.edges.size());
            for (std::size_t k = 1; k < b.edges.size(); ++k)
                CHECK(b.edges[k] - b.edges[k - 1] == period);
        }
        // Every offset in [1, 4t] was seen.
        CHECK(static_cast<int>(by_offset_8t.size()) == period);
        CHECK(static_cast<int>(by_offset_8t1.size()) == period);
        for (const auto& [off, count] : by_offset_8t)
            CHECK(count == 2);
        // 8t+1 edges: offset 1 also reaches the last edge.
        for (const auto& [off, count] : by_offset_8t1)
            CHECK(count == (off == 1 ? 3 : 2));
    }
}

TEST_CASE("path drop frequency is at most 1/(4t)")
{
    const int t = 25, N = 20000;
    for (int len : {100, 250}) {
        const SupportTopology top = path_graph(len);
        std::vector<int> hits(static_cast<std::size_t>(len), 0);
        for (int s = 0; s < N; ++s) {
            Rng rng(derive_seed(13, static_cast<std::uint64_t>(s)));
            for (int e : drop_plan(top, t, rng).edges)
                ++hits[static_cast<std::size_t>(e)];
        }
        const double p = 1.0 / (4 * t), sigma = std::sqrt(p * (1 - p) / N);
        for (int h : hits)
            CHECK(h / double(N) <= p + 3 * sigma);
    }
}

TEST_CASE("long cycle drops every 4t-th edge")
{
    const int t = 4, N = 20000;
    const SupportTopology top = cycle_graph(64);
    std::vector<int> hits(64, 0);
    for (int s = 0; s < N; ++s) {
        Rng rng(derive_seed(17, static_cast<std::uint64_t>(s)));
        const DropPlan plan = drop_plan(top, t, rng);
        REQUIRE(plan.edges.size() == 4);
        for (int e : plan.edges)
            ++hits[static_cast<std::size_t>(e)];
    }
    const double p = 1.0 / 16, sigma = std::sqrt(p * (1 - p) / N);
    for (int h : hits)
        CHECK(h / double(N) <= p + 3 * sigma);
}

TEST_CASE("path bound examples")
{
    const PathBound star = lemma_path_bound(from_edges(4, {{0, 1}, {0, 2}, {0, 3}}), 1);
    CHECK(star.lhs == 3);
    CHECK(star.rhs == doctest::Approx(1.25));
    CHECK(star.pass);

    const SupportTopology theta = from_edges(5, {{0, 2}, {2, 1}, {0, 3}, {3, 1}, {0, 4}, {4, 1}});
    CHECK(theta.d2 == 3);
    CHECK(theta.d3plus == 2);
    const PathBound b = lemma_path_bound(theta, 2);
    CHECK(b.lhs == 6);
    CHECK(b.rhs == doctest::Approx(5.625));
    CHECK(b.pass);

    CHECK_THROWS_AS(lemma_path_bound(theta, 1), PreconditionViolated);
    CHECK_THROWS_AS(lemma_path_bound(cycle_graph(5), 3), PreconditionViolated);
}

TEST_CASE("slack parameters")
{
    CHECK(matching_t(0.2) == 20);
    CHECK(matching_t(0.5) == 8);
    CHECK(matching_t(0.3) == 14);
    CHECK(matching_slack(0.2) == doctest::Approx(1.0 / 640));
    // Two exposures of 1/(4t) each stay within delta/2.
    for (double d : {0.05, 0.2, 0.5, 0.9})
        CHECK(2.0 / (4 * matching_t(d)) <= d / 2 + 1e-15);
}

TEST_CASE("four-cycle rounds to each perfect matching half the time")
{
    const BipartiteMatchingInstance inst = gen_matching(2, "cycle", 0);
    validate(inst);
    const OracleContract o = matching_oracle(inst);
    const int N = 10000;
    int first = 0;
    for (int s = 0; s < N; ++s) {
        const RoundingOutcome out = subiso_round(initial_point(inst), o, seeded(derive_seed(23, static_cast<std::uint64_t>(s))));
        const MatchingReport rep = verify_matching(inst, out);
        REQUIRE(rep.is_matching);
        REQUIRE(rep.n_matched == 4);
        first += out.X[0] > 0.5;
    }
    CHECK(std::abs(first / double(N) - 0.5) <= 0.02);
}

TEST_CASE("long cycle leaves few vertices unmatched")
{
    // 64-cycle at delta = 1/2: t = 8, so two edges are dropped per run.
    const BipartiteMatchingInstance inst = gen_matching(32, "cycle", 0, 0.5);
    const OracleContract o = matching_oracle(inst);
    const int N = 2000;
    std::vector<int> unmatched(64, 0);
    for (int s = 0; s < N; ++s) {
        const MatchingReport rep =
            verify_matching(inst, subiso_round(initial_point(inst), o, seeded(derive_seed(29, static_cast<std::uint64_t>(s)))));
        REQUIRE(rep.is_matching);
        for (int v = 0; v < 64; ++v)
            unmatched[static_cast<std::size_t>(v)] += !rep.matched[static_cast<std::size_t>(v)];
    }
    const double p = 2.0 / 32, sigma = std::sqrt(p * (1 - p) / N);
    for (int u : unmatched)
        CHECK(u / double(N) <= p + 3 * sigma);
}

TEST_CASE("outcomes are always matchings")
{
    for (std::uint64_t g = 0; g < 5; ++g) {
        const BipartiteMatchingInstance inst = gen_matching(8, "random", g, 0.3);
        validate(inst);
        const OracleContract o = matching_oracle(inst);
        for (std::uint64_t s = 0; s < 40; ++s)
            CHECK(verify_matching(inst, subiso_round(initial_point(inst), o, seeded(s))).is_matching);
    }
}

TEST_CASE("vertex rows only for degree two or more")
{
    BipartiteMatchingInstance inst = gen_matching(3, "cycle", 0);
    FractionalState st(initial_point(inst));
    st.x[0] = 0;
    st.snap();
    Rng rng(0);
    const SubspaceSpec spec = matching_oracle(inst).subspace(st, rng);
    // Two endpoints of the removed edge dropped to degree one.
    CHECK(spec.rows.size() == 4);
    CHECK(spec.forced_zero.empty());
}

TEST_CASE("validator")
{
    BipartiteMatchingInstance inst = gen_matching(2, "cycle", 0);
    inst.edges[0].x0 = 0.6;
    CHECK_THROWS_AS(validate(inst), InvalidInstance);
    inst = gen_matching(2, "cycle", 0);
    inst.n_right = 3;
    CHECK_THROWS_AS(validate(inst), InvalidInstance);
    inst = gen_matching(2, "cycle", 0);
    inst.edges.push_back(inst.edges[0]);
    CHECK_THROWS_AS(validate(inst), InvalidInstance);
}
