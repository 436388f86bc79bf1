#include "subiso/degmat.hpp"

#include "subiso/errors.hpp"
#include "subiso/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace subiso {

namespace {

constexpr double kViolation = 1e-7;
// Sets within kTight of their rank count as tight. The per-vertex penalty makes
// the minimum cut prefer the smallest such set over fixed-point ties.
constexpr double kTight = 5e-10;
constexpr double kPenalty = 1e-9;
constexpr int kMaxBruteVertices = 20;

// Alive support with x = 1 edges contracted and x = 0 edges deleted. Only
// contracted vertices touching an alive edge are kept.
struct Support {
    int n = 0;
    std::vector<std::pair<int, int>> edges;   // local endpoints
    std::vector<int> ids;                     // global edge index per local edge
    std::vector<std::vector<int>> members;    // original vertices per local vertex
};

Support build_support(const FractionalState& st, const DegreeTreeInstance& inst)
{
    const Graph& g = inst.graph;
    Components comp(g.n);
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e)
        if (!st.is_alive(e) && st.x[e] > 0.5)
            comp.unite(g.edges[static_cast<std::size_t>(e)].u, g.edges[static_cast<std::size_t>(e)].v);

    Support s;
    std::vector<int> local(static_cast<std::size_t>(g.n), -1);
    auto id = [&](int v) {
        const int r = comp.find(v);
        int& l = local[static_cast<std::size_t>(r)];
        if (l < 0)
            l = s.n++;
        return l;
    };
    for (int e : st.alive) {
        const Edge& ed = g.edges[static_cast<std::size_t>(e)];
        const int a = id(ed.u), b = id(ed.v);
        if (a == b)
            throw NotInPolytope("alive edge " + std::to_string(e) + " closes a cycle of integral edges");
        s.edges.emplace_back(a, b);
        s.ids.push_back(e);
    }
    s.members.resize(static_cast<std::size_t>(s.n));
    for (int v = 0; v < g.n; ++v) {
        const int l = local[static_cast<std::size_t>(comp.find(v))];
        if (l >= 0)
            s.members[static_cast<std::size_t>(l)].push_back(v);
    }
    return s;
}

std::vector<double> support_values(const FractionalState& st, const Support& s)
{
    std::vector<double> z(s.ids.size());
    for (std::size_t k = 0; k < s.ids.size(); ++k)
        z[k] = st.x[s.ids[k]];
    return z;
}

std::vector<char> induced(const Support& s, const std::vector<char>& side)
{
    std::vector<char> in(s.edges.size(), 0);
    for (std::size_t k = 0; k < s.edges.size(); ++k)
        in[k] = side[static_cast<std::size_t>(s.edges[k].first)] && side[static_cast<std::size_t>(s.edges[k].second)];
    return in;
}

SparseRow edge_row(const Support& s, const std::vector<char>& mask, const std::string& label)
{
    SparseRow r{{}, label};
    for (std::size_t k = 0; k < mask.size(); ++k)
        if (mask[k])
            r.entries.emplace_back(s.ids[k], 1.0);
    std::sort(r.entries.begin(), r.entries.end());
    return r;
}

Eigen::MatrixXd dense(const std::vector<SparseRow>& rows, int n)
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), n);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (const auto& [j, v] : rows[r].entries)
            m(static_cast<Eigen::Index>(r), j) += v;
    return m;
}

Eigen::Index rank_of(const Eigen::MatrixXd& m)
{
    if (m.rows() == 0)
        return 0;
    return orthonormal_basis(m, 1e-9).rows();
}

}  // namespace

std::vector<DegreeSet> vertex_degree_sets(const Graph& g, int b)
{
    std::vector<DegreeSet> sets(static_cast<std::size_t>(g.n));
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
        sets[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].u)].edges.push_back(e);
        sets[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].v)].edges.push_back(e);
    }
    for (DegreeSet& s : sets)
        s.b = b;
    return sets;
}

int cover_number(const DegreeTreeInstance& inst)
{
    std::vector<int> cover(inst.graph.edges.size(), 0);
    for (const DegreeSet& s : inst.degree_sets)
        for (int e : s.edges)
            ++cover.at(static_cast<std::size_t>(e));
    return cover.empty() ? 0 : *std::max_element(cover.begin(), cover.end());
}

void validate(const DegreeTreeInstance& inst)
{
    const Graph& g = inst.graph;
    const int m = static_cast<int>(g.edges.size());
    if (g.n <= 0)
        throw InvalidInstance("graph has no vertices");
    for (const Edge& e : g.edges) {
        if (e.u < 0 || e.v < 0 || e.u >= g.n || e.v >= g.n || e.u == e.v)
            throw InvalidInstance("edge endpoints must be distinct vertices");
        if (!(e.cost >= 0))
            throw InvalidInstance("edge costs must be nonnegative");
    }
    if (inst.x0.size() != m)
        throw InvalidInstance("x0 length differs from the edge count");
    if ((inst.x0.array() < 0).any() || (inst.x0.array() > 1).any())
        throw InvalidInstance("x0 outside [0,1]");
    if (!(inst.delta > 0 && inst.delta < 0.5))
        throw InvalidInstance("delta must lie in (0,1/2)");
    for (const DegreeSet& s : inst.degree_sets)
        for (int e : s.edges)
            if (e < 0 || e >= m)
                throw InvalidInstance("degree set references a missing edge");
    if (inst.q < cover_number(inst))
        throw InvalidInstance("q is below the cover number of the degree sets");
    if (std::abs(inst.x0.sum() - (g.n - 1)) > kViolation)
        throw NotInPolytope("x0 does not sum to |V| - 1");

    std::vector<std::pair<int, int>> edges;
    std::vector<double> z;
    for (int e = 0; e < m; ++e) {
        edges.emplace_back(g.edges[static_cast<std::size_t>(e)].u, g.edges[static_cast<std::size_t>(e)].v);
        z.push_back(inst.x0[e]);
    }
    for (int v = 0; v < g.n; ++v) {
        const double slack = min_tree_slack(g.n, edges, z, {v}).first;
        if (slack < 1 - kViolation) {
            std::ostringstream os;
            os << "x0 violates a rank constraint by " << 1 - slack;
            throw NotInPolytope(os.str());
        }
    }
}

double degree_excess(const FractionalState& state, const DegreeTreeInstance& inst, int j)
{
    double e = 0;
    for (int i : inst.degree_sets.at(static_cast<std::size_t>(j)).edges)
        if (state.is_alive(i))
            e += 1 - state.x[i];
    return e;
}

std::vector<SparseRow> ChainFamily::rows() const
{
    std::vector<SparseRow> out;
    for (std::size_t c = 0; c < edges.size(); ++c) {
        SparseRow r{{}, "chain " + std::to_string(c)};
        for (int e : edges[c])
            r.entries.emplace_back(e, 1.0);
        out.push_back(std::move(r));
    }
    return out;
}

ChainFamily tight_chain(const FractionalState& state, const DegreeTreeInstance& inst)
{
    const Support s = build_support(state, inst);
    const std::vector<double> z = support_values(state, s);
    const std::size_t m = s.edges.size();

    // Minimal tight vertex set around each alive edge.
    std::vector<std::vector<char>> around(m);
    for (std::size_t k = 0; k < m; ++k) {
        auto [slack, side] = min_tree_slack(s.n, s.edges, z, {s.edges[k].first, s.edges[k].second}, kPenalty);
        if (slack < 1 - kViolation)
            throw NotInPolytope("rank constraint violated by " + std::to_string(1 - slack));
        if (slack > 1 + kPenalty * s.n)
            throw NotInPolytope("alive edge " + std::to_string(s.ids[k]) + " lies in no tight set");
        around[k] = std::move(side);
    }

    ChainFamily chain;
    std::vector<char> cur_v(static_cast<std::size_t>(s.n), 0), cur_e(m, 0);
    std::size_t covered = 0;
    while (covered < m) {
        std::size_t best_size = m + 1;
        std::vector<char> best_v, best_e;
        for (std::size_t k = 0; k < m; ++k) {
            if (cur_e[k])
                continue;
            std::vector<char> v = cur_v;
            for (int u = 0; u < s.n; ++u)
                v[static_cast<std::size_t>(u)] |= around[k][static_cast<std::size_t>(u)];
            // Tight edge sets are closed under union.
            std::vector<char> e = induced(s, around[k]);
            std::size_t size = 0;
            for (std::size_t i = 0; i < m; ++i) {
                e[i] |= cur_e[i];
                size += static_cast<std::size_t>(e[i]);
            }
            if (size < best_size) {
                best_size = size;
                best_v = std::move(v);
                best_e = std::move(e);
            }
        }
        cur_v = std::move(best_v);
        cur_e = std::move(best_e);
        covered = best_size;

        std::vector<int> verts, eds;
        for (int u = 0; u < s.n; ++u)
            if (cur_v[static_cast<std::size_t>(u)])
                verts.insert(verts.end(), s.members[static_cast<std::size_t>(u)].begin(),
                             s.members[static_cast<std::size_t>(u)].end());
        for (std::size_t i = 0; i < m; ++i)
            if (cur_e[i])
                eds.push_back(s.ids[i]);
        std::sort(verts.begin(), verts.end());
        std::sort(eds.begin(), eds.end());
        chain.vertices.push_back(std::move(verts));
        chain.edges.push_back(std::move(eds));
    }
    return chain;
}

std::vector<SparseRow> tight_rows_bruteforce(const FractionalState& state, const DegreeTreeInstance& inst)
{
    const Support s = build_support(state, inst);
    if (s.n > kMaxBruteVertices)
        throw BadShape("support has " + std::to_string(s.n) + " vertices, enumeration limit is " +
                       std::to_string(kMaxBruteVertices));
    const std::vector<double> z = support_values(state, s);
    const std::size_t m = s.edges.size();

    std::vector<SparseRow> rows;
    std::vector<std::vector<char>> seen;
    for (unsigned long mask = 1; mask < (1ul << s.n); ++mask) {
        std::vector<char> side(static_cast<std::size_t>(s.n));
        for (int u = 0; u < s.n; ++u)
            side[static_cast<std::size_t>(u)] = static_cast<char>((mask >> u) & 1);
        const std::vector<char> in = induced(s, side);
        double x = 0;
        std::vector<char> touched(static_cast<std::size_t>(s.n), 0);
        Components comp(s.n);
        bool any = false;
        for (std::size_t k = 0; k < m; ++k)
            if (in[k]) {
                any = true;
                x += z[k];
                touched[static_cast<std::size_t>(s.edges[k].first)] = 1;
                touched[static_cast<std::size_t>(s.edges[k].second)] = 1;
                comp.unite(s.edges[k].first, s.edges[k].second);
            }
        if (!any)
            continue;
        int nv = 0;
        for (char t : touched)
            nv += t;
        // Untouched vertices stay singletons in comp.
        const int rank = nv - (comp.count() - (s.n - nv));
        if (x > rank + kViolation)
            throw NotInPolytope("rank constraint violated by " + std::to_string(x - rank));
        if (x >= rank - kTight && std::find(seen.begin(), seen.end(), in) == seen.end()) {
            seen.push_back(in);
            rows.push_back(edge_row(s, in, "tight"));
        }
    }
    return rows;
}

bool chain_matches_bruteforce(const FractionalState& state, const DegreeTreeInstance& inst)
{
    const int n = state.n();
    const Eigen::MatrixXd a = dense(tight_chain(state, inst).rows(), n);
    const Eigen::MatrixXd b = dense(tight_rows_bruteforce(state, inst), n);
    Eigen::MatrixXd both(a.rows() + b.rows(), n);
    both << a, b;
    const Eigen::Index r = rank_of(both);
    return rank_of(a) == r && rank_of(b) == r;
}

double tree_step_limit(const FractionalState& state, const DegreeTreeInstance& inst, const Eigen::VectorXd& y,
                       double gamma_cap)
{
    const Support s = build_support(state, inst);
    const std::vector<double> x = support_values(state, s);
    std::vector<double> dy(s.ids.size());
    for (std::size_t k = 0; k < s.ids.size(); ++k)
        dy[k] = y[s.ids[k]];

    double gamma = gamma_cap;
    for (const double sign : {1.0, -1.0}) {
        // Dinkelbach: shrink gamma to the most violated set until none remains.
        for (int round = 0; round < 4 * s.n + 8; ++round) {
            std::vector<double> z(x.size());
            for (std::size_t k = 0; k < x.size(); ++k)
                z[k] = std::max(0.0, x[k] + sign * gamma * dy[k]);
            bool violated = false;
            for (int r = 0; r < s.n && !violated; ++r) {
                auto [slack, side] = min_tree_slack(s.n, s.edges, z, {r});
                if (slack >= 1 - 1e-10)
                    continue;
                const std::vector<char> in = induced(s, side);
                double xs = 0, ys = 0;
                int size = 0;
                for (char c : side)
                    size += c;
                for (std::size_t k = 0; k < in.size(); ++k)
                    if (in[k]) {
                        xs += x[k];
                        ys += sign * dy[k];
                    }
                if (!(ys > 0))
                    throw NotInPolytope("current point violates a rank constraint");
                const double g = std::max(0.0, (size - 1 - xs) / ys);
                if (g >= gamma)
                    continue;
                gamma = g;
                violated = true;
            }
            if (!violated)
                break;
        }
    }
    return gamma;
}

OracleContract degmat_oracle(const DegreeTreeInstance& inst)
{
    validate(inst);
    OracleContract c;
    c.delta = inst.delta;
    c.name = "degmat";
    const double threshold = inst.q / (1 - 2 * inst.delta);
    c.subspace = [inst, threshold](const FractionalState& st, Rng&) {
        SubspaceSpec spec;
        int protected_sets = 0;
        for (int j = 0; j < static_cast<int>(inst.degree_sets.size()); ++j) {
            if (degree_excess(st, inst, j) < threshold)
                continue;
            SparseRow r{{}, "degree " + std::to_string(j)};
            for (int e : inst.degree_sets[static_cast<std::size_t>(j)].edges)
                if (st.is_alive(e))
                    r.entries.emplace_back(e, 1.0);
            if (!r.entries.empty()) {
                spec.rows.push_back(std::move(r));
                ++protected_sets;
            }
        }
        const ChainFamily chain = tight_chain(st, inst);
        for (SparseRow& r : chain.rows())
            spec.rows.push_back(std::move(r));
        // The top chain element is the base row.
        if (!spec.rows.empty() && chain.size() > 0)
            spec.rows.back().label = "base";
        spec.note = std::to_string(protected_sets) + " degree rows, " + std::to_string(chain.size()) + " chain rows";
        return spec;
    };
    c.step_limit = [inst](const FractionalState& st, const Eigen::VectorXd& y) {
        double cap = std::numeric_limits<double>::infinity();
        for (int i : st.alive)
            if (y[i] != 0)
                cap = std::min(cap, std::min(st.x[i], 1 - st.x[i]) / std::abs(y[i]));
        return tree_step_limit(st, inst, y, cap);
    };
    return c;
}

TreeReport verify_tree(const DegreeTreeInstance& inst, const RoundingOutcome& outcome)
{
    const Graph& g = inst.graph;
    if (outcome.X.size() != static_cast<Eigen::Index>(g.edges.size()))
        throw BadShape("outcome length differs from the edge count");
    std::vector<std::pair<int, int>> chosen;
    std::vector<char> pick(g.edges.size(), 0);
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const double v = outcome.X[static_cast<Eigen::Index>(e)];
        if (v != 0 && v != 1)
            throw PreconditionViolated("outcome is not integral at edge " + std::to_string(e));
        if (v == 1) {
            pick[e] = 1;
            chosen.emplace_back(g.edges[e].u, g.edges[e].v);
        }
    }
    if (!is_spanning_tree(g.n, chosen))
        throw NotATree("selected " + std::to_string(chosen.size()) + " edges on " + std::to_string(g.n) +
                       " vertices do not form a spanning tree");

    TreeReport rep;
    rep.bound = inst.q / (1 - 2 * inst.delta);
    rep.max_violation = std::numeric_limits<int>::min();
    for (const DegreeSet& s : inst.degree_sets) {
        int d = 0;
        for (int e : s.edges)
            d += pick[static_cast<std::size_t>(e)];
        rep.degree.push_back(d);
        rep.violation.push_back(d - s.b);
        rep.max_violation = std::max(rep.max_violation, d - s.b);
    }
    if (inst.degree_sets.empty())
        rep.max_violation = 0;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        rep.cost += pick[e] * g.edges[e].cost;
        rep.fractional_cost += inst.x0[static_cast<Eigen::Index>(e)] * g.edges[e].cost;
    }
    rep.pass = rep.max_violation < rep.bound;
    return rep;
}

}  // namespace subiso
