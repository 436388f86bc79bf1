#include "subiso/io.hpp"

#include "subiso/errors.hpp"

#include <fstream>
#include <sstream>

namespace subiso {

using nlohmann::json;

namespace {

constexpr const char* kSchema = "subiso/1";

template <class... F>
struct overloaded : F... {
    using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

std::vector<double> to_vec(const Eigen::VectorXd& v)
{
    return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd from_vec(const json& j)
{
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json sparse_lp_json(const SparseLPInstance& s)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < s.A.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < s.A.cols(); ++j)
            if (s.A(i, j) != 0)
                row.push_back({j, s.A(i, j)});
        rows.push_back(row);
    }
    return {{"kind", "sparse_lp"}, {"m", s.A.rows()}, {"n", s.A.cols()}, {"rows", rows}, {"x0", to_vec(s.x0)},
            {"delta", s.delta}, {"norm_mode", s.norm_mode == NormMode::L1 ? "l1" : "l2"}};
}

SparseLPInstance sparse_lp_from(const json& j)
{
    SparseLPInstance s;
    const int m = j.at("m").get<int>(), n = j.at("n").get<int>();
    if (m < 0 || n < 0)
        throw InvalidInstance("m and n must be nonnegative");
    s.A = Eigen::MatrixXd::Zero(m, n);
    const json& rows = j.at("rows");
    if (static_cast<int>(rows.size()) != m)
        throw InvalidInstance("rows has " + std::to_string(rows.size()) + " entries, expected m");
    for (int i = 0; i < m; ++i) {
        const json& row = rows[static_cast<std::size_t>(i)];
        const bool sparse = !row.empty() && row[0].is_array();
        if (!sparse && !row.empty() && static_cast<int>(row.size()) != n)
            throw InvalidInstance("dense row " + std::to_string(i) + " does not have n entries");
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (sparse) {
                const int c = row[k].at(0).get<int>();
                if (c < 0 || c >= n)
                    throw InvalidInstance("column index out of range in row " + std::to_string(i));
                s.A(i, c) += row[k].at(1).get<double>();
            } else {
                s.A(i, static_cast<Eigen::Index>(k)) = row[k].get<double>();
            }
        }
    }
    s.x0 = from_vec(j.at("x0"));
    s.delta = j.value("delta", 0.5);
    const std::string mode = j.value("norm_mode", "l1");
    if (mode != "l1" && mode != "l2")
        throw InvalidInstance("norm_mode must be l1 or l2");
    s.norm_mode = mode == "l1" ? NormMode::L1 : NormMode::L2;
    return s;
}

json makespan_json(const MakespanInstance& s)
{
    json p = json::array();
    for (const Eigen::MatrixXd& ph : s.p) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < ph.rows(); ++i)
            rows.push_back(to_vec(ph.row(i).transpose()));
        p.push_back(rows);
    }
    json x0 = json::array();
    for (Eigen::Index i = 0; i < s.x0.rows(); ++i)
        for (Eigen::Index j = 0; j < s.x0.cols(); ++j)
            if (s.x0(i, j) != 0)
                x0.push_back({i, j, s.x0(i, j)});
    return {{"kind", "makespan"}, {"m", s.m}, {"r", s.r}, {"q", s.q}, {"p", p},
            {"T", s.T}, {"x0", x0}, {"delta", s.delta}};
}

MakespanInstance makespan_from(const json& j)
{
    MakespanInstance s;
    s.m = j.at("m").get<int>();
    s.r = j.at("r").get<int>();
    s.q = j.value("q", 1);
    s.delta = j.value("delta", 0.25);
    const json& p = j.at("p");
    // Accept a single m x r matrix when q = 1.
    const bool nested = !p.empty() && !p[0].empty() && p[0][0].is_array();
    const json all = nested ? p : json::array({p});
    for (const json& ph : all) {
        const auto rows = ph.get<std::vector<std::vector<double>>>();
        Eigen::MatrixXd mat(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (static_cast<Eigen::Index>(rows[i].size()) != mat.cols())
                throw InvalidInstance("ragged size matrix");
            for (std::size_t k = 0; k < rows[i].size(); ++k)
                mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
        }
        s.p.push_back(mat);
    }
    const json& T = j.at("T");
    s.T = T.is_array() ? T.get<std::vector<double>>() : std::vector<double>{T.get<double>()};
    s.x0 = Eigen::MatrixXd::Zero(s.m, s.r);
    for (const json& t : j.at("x0")) {
        const int i = t.at(0).get<int>(), k = t.at(1).get<int>();
        if (i < 0 || i >= s.m || k < 0 || k >= s.r)
            throw InvalidInstance("x0 triplet out of range");
        s.x0(i, k) = t.at(2).get<double>();
    }
    return s;
}

json tree_json(const DegreeTreeInstance& s)
{
    json edges = json::array(), sets = json::array();
    for (const Edge& e : s.graph.edges)
        edges.push_back({e.u, e.v, e.cost});
    for (const DegreeSet& d : s.degree_sets)
        sets.push_back({{"edges", d.edges}, {"b", d.b}});
    return {{"kind", "tree"}, {"vertices", s.graph.n}, {"edges", edges}, {"degree_sets", sets},
            {"x0", to_vec(s.x0)}, {"delta", s.delta}, {"q", s.q}};
}

DegreeTreeInstance tree_from(const json& j)
{
    DegreeTreeInstance s;
    s.graph.n = j.at("vertices").get<int>();
    for (const json& e : j.at("edges"))
        s.graph.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.size() > 2 ? e.at(2).get<double>() : 0.0});
    if (j.contains("degree_sets"))
        for (const json& d : j.at("degree_sets"))
            s.degree_sets.push_back({d.at("edges").get<std::vector<int>>(), d.at("b").get<int>()});
    s.x0 = from_vec(j.at("x0"));
    s.delta = j.value("delta", 1.0 / 6 - 0.01);
    for (const DegreeSet& d : s.degree_sets)
        for (int e : d.edges)
            if (e < 0 || e >= static_cast<int>(s.graph.edges.size()))
                throw InvalidInstance("degree set references a missing edge");
    s.q = j.contains("q") ? j.at("q").get<int>() : std::max(1, cover_number(s));
    return s;
}

json matching_json(const BipartiteMatchingInstance& s)
{
    json edges = json::array();
    for (const MatchEdge& e : s.edges)
        edges.push_back({e.u, e.v, e.x0});
    return {{"kind", "matching"}, {"n_left", s.n_left}, {"n_right", s.n_right}, {"edges", edges}, {"delta", s.delta}};
}

BipartiteMatchingInstance matching_from(const json& j)
{
    BipartiteMatchingInstance s;
    s.n_left = j.at("n_left").get<int>();
    s.n_right = j.at("n_right").get<int>();
    s.delta = j.value("delta", 0.2);
    for (const json& e : j.at("edges"))
        s.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    return s;
}

bool integral(const Eigen::VectorXd& x)
{
    return ((x.array() == 0) || (x.array() == 1)).all();
}

}  // namespace

std::string instance_kind(const Instance& inst)
{
    return std::visit(overloaded{[](const TrivialInstance&) { return "trivial"; },
                                 [](const BlockInstance&) { return "block"; },
                                 [](const SparseLPInstance&) { return "sparse_lp"; },
                                 [](const MakespanInstance&) { return "makespan"; },
                                 [](const DegreeTreeInstance&) { return "tree"; },
                                 [](const BipartiteMatchingInstance&) { return "matching"; }},
                      inst);
}

json to_json(const Instance& inst)
{
    json j = std::visit(
        overloaded{[](const TrivialInstance& s) -> json {
                       return {{"kind", "trivial"}, {"x0", to_vec(s.x0)}, {"delta", s.delta}};
                   },
                   [](const BlockInstance& s) -> json { return {{"kind", "block"}, {"n", s.n}, {"t", s.t}}; },
                   [](const SparseLPInstance& s) { return sparse_lp_json(s); },
                   [](const MakespanInstance& s) { return makespan_json(s); },
                   [](const DegreeTreeInstance& s) { return tree_json(s); },
                   [](const BipartiteMatchingInstance& s) { return matching_json(s); }},
        inst);
    j["schema"] = kSchema;
    return j;
}

Instance instance_from_json(const json& j)
{
    if (!j.is_object())
        throw InvalidInstance("instance must be a JSON object");
    std::string kind = j.value("kind", "");
    if (kind.empty()) {
        if (j.contains("n_left"))
            kind = "matching";
        else if (j.contains("vertices"))
            kind = "tree";
        else if (j.contains("p"))
            kind = "makespan";
        else if (j.contains("rows"))
            kind = "sparse_lp";
        else if (j.contains("t") && j.contains("n"))
            kind = "block";
        else if (j.contains("x0"))
            kind = "trivial";
    }
    try {
        if (kind == "trivial")
            return TrivialInstance{from_vec(j.at("x0")), j.value("delta", 0.5)};
        if (kind == "block")
            return gen_block_instance(j.at("n").get<int>(), j.at("t").get<int>());
        if (kind == "sparse_lp")
            return sparse_lp_from(j);
        if (kind == "makespan")
            return makespan_from(j);
        if (kind == "tree")
            return tree_from(j);
        if (kind == "matching")
            return matching_from(j);
    } catch (const json::exception& e) {
        throw InvalidInstance(std::string("malformed ") + kind + " instance: " + e.what());
    }
    throw InvalidInstance("cannot tell the instance family" + (kind.empty() ? std::string() : " '" + kind + "'"));
}

json outcome_to_json(const RoundingOutcome& out)
{
    json trace = json::array();
    for (const IterationRecord& r : out.trace)
        trace.push_back({{"n_alive", r.n_alive},
                         {"dim_w", r.dim_w},
                         {"gamma", r.gamma},
                         {"frozen", r.frozen},
                         {"forced_zero", r.forced_zero},
                         {"note", r.note}});
    return {{"schema", kSchema}, {"seed", out.seed},           {"X", to_vec(out.X)},
            {"sdp_solves", out.sdp_solves}, {"wall_steps", out.wall_steps}, {"trace", trace}};
}

RoundingOutcome outcome_from_json(const json& j)
{
    RoundingOutcome out;
    try {
        out.X = from_vec(j.at("X"));
        out.seed = j.value("seed", std::uint64_t{0});
        out.sdp_solves = j.value("sdp_solves", 0L);
        out.wall_steps = j.value("wall_steps", 0L);
        for (const json& r : j.value("trace", json::array())) {
            IterationRecord rec;
            rec.n_alive = r.value("n_alive", 0);
            rec.dim_w = r.value("dim_w", 0);
            rec.gamma = r.value("gamma", 0.0);
            rec.frozen = r.value("frozen", std::vector<int>{});
            rec.forced_zero = r.value("forced_zero", std::vector<int>{});
            rec.note = r.value("note", "");
            out.trace.push_back(std::move(rec));
        }
    } catch (const json::exception& e) {
        throw InvalidInstance(std::string("malformed outcome: ") + e.what());
    }
    return out;
}

Instance generate_instance(const json& spec)
{
    try {
        const std::string family = spec.at("family").get<std::string>();
        const auto seed = spec.value("seed", std::uint64_t{1});
        if (family == "trivial") {
            TrivialInstance t = gen_trivial_instance(spec.value("n", 32), spec.value("value", 0.5));
            t.delta = spec.value("delta", 0.5);
            return t;
        }
        if (family == "block")
            return gen_block_instance(spec.value("n", 32), spec.value("t", 4));
        if (family == "sparse_lp") {
            const std::string norm = spec.value("norm", "l1");
            if (norm != "l1" && norm != "l2")
                throw BadShape("norm must be l1 or l2");
            SparseLPInstance s = gen_sparse_lp(spec.value("m", 64), spec.value("n", 64), spec.value("col_sum", 4),
                                               norm == "l1" ? NormMode::L1 : NormMode::L2, seed);
            s.delta = spec.value("delta", 0.5);
            return s;
        }
        if (family == "makespan")
            return gen_makespan(spec.value("m", 4), spec.value("r", 12), seed, spec.value("q", 1),
                                spec.value("combos", 8), spec.value("delta", 0.25));
        if (family == "tree") {
            const std::string shape = spec.value("shape", "petersen");
            const double delta = spec.value("delta", 1.0 / 6 - 0.01);
            if (shape == "cycle")
                return gen_tree_cycle(spec.value("length", 5), delta);
            if (shape == "petersen")
                return gen_tree_from_graph(petersen_graph(), seed, spec.value("paths", 8), delta);
            if (shape == "cubic")
                return gen_tree_from_graph(random_cubic_graph(spec.value("n", 12), seed), seed, spec.value("paths", 8),
                                           delta);
            throw BadShape("unknown tree shape '" + shape + "'");
        }
        if (family == "matching")
            return gen_matching(spec.value("n", 16), spec.value("shape", "random"), seed, spec.value("delta", 0.2),
                                spec.value("perms", 4));
        throw BadShape("unknown generator family '" + family + "'");
    } catch (const json::exception& e) {
        throw BadShape(std::string("malformed generator spec: ") + e.what());
    }
}

void apply_mode(RoundParams& params, const std::string& mode)
{
    params.gamma_mode = GammaMode::boundary;
    params.step_mode = StepMode::random;
    params.energy_mode = false;
    if (mode == "faithful")
        params.gamma_mode = GammaMode::faithful;
    else if (mode == "deterministic")
        params.step_mode = StepMode::deterministic;
    else if (mode == "energy")
        params.energy_mode = true;
    else if (mode != "boundary")
        throw BadShape("unknown mode '" + mode + "'");
}

json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidInstance("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInstance(path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
        throw InvalidInstance("cannot write " + path);
    out << text;
}

Problem make_problem(const Instance& inst, std::optional<double> delta)
{
    Problem pr;
    pr.kind = instance_kind(inst);
    std::visit(
        overloaded{
            [&](const TrivialInstance& s) {
                pr.x0 = s.x0;
                pr.oracle = trivial_oracle(delta.value_or(s.delta));
                pr.verify = [](const RoundingOutcome& o) { return Verdict{integral(o.X), json::object()}; };
            },
            [&](const BlockInstance& s) {
                pr.x0 = s.x0;
                pr.oracle = block_oracle(s);
                pr.verify = [s](const RoundingOutcome& o) {
                    bool equal = true;
                    for (int i = 0; i + 1 < s.n; ++i)
                        if ((i + 1) % s.t != 0 && o.X[i] != o.X[i + 1])
                            equal = false;
                    return Verdict{integral(o.X) && equal, {{"blocks_equal", equal}}};
                };
            },
            [&](const SparseLPInstance& s0) {
                SparseLPInstance s = s0;
                if (delta)
                    s.delta = *delta;
                pr.x0 = s.x0;
                pr.oracle = s.norm_mode == NormMode::L1 ? bf_oracle(s) : komlos_oracle(s);
                pr.verify = [s](const RoundingOutcome& o) {
                    const RowErrorReport r = verify_row_errors(s, o);
                    return Verdict{r.pass, {{"max_error", r.max_error}, {"bound", r.bound}, {"constant", r.constant}}};
                };
            },
            [&](const MakespanInstance& s0) {
                MakespanInstance s = s0;
                if (delta)
                    s.delta = *delta;
                const MakespanModel mdl = make_model(s);
                pr.x0 = initial_point(s, mdl);
                pr.oracle = lst_oracle(s);
                if (s.delta == 0)
                    pr.step_mode = StepMode::deterministic;
                pr.verify = [s](const RoundingOutcome& o) {
                    const LoadReport r = verify_loads(s, o);
                    return Verdict{r.pass,
                                   {{"max_excess", r.max_excess}, {"bound", r.bound}, {"p_max", r.p_max},
                                    {"interpreted", r.interpreted}}};
                };
            },
            [&](const DegreeTreeInstance& s0) {
                DegreeTreeInstance s = s0;
                if (delta)
                    s.delta = *delta;
                pr.x0 = s.x0;
                pr.oracle = degmat_oracle(s);
                pr.verify = [s](const RoundingOutcome& o) {
                    const TreeReport r = verify_tree(s, o);
                    return Verdict{r.pass,
                                   {{"max_violation", r.max_violation}, {"bound", r.bound}, {"cost", r.cost},
                                    {"fractional_cost", r.fractional_cost}, {"violation", r.violation}}};
                };
            },
            [&](const BipartiteMatchingInstance& s0) {
                BipartiteMatchingInstance s = s0;
                if (delta)
                    s.delta = *delta;
                pr.x0 = initial_point(s);
                pr.oracle = matching_oracle(s);
                pr.verify = [s](const RoundingOutcome& o) {
                    const MatchingReport r = verify_matching(s, o);
                    return Verdict{r.pass,
                                   {{"is_matching", r.is_matching}, {"n_matched", r.n_matched}, {"value", r.value}}};
                };
            }},
        inst);
    pr.delta = pr.oracle.delta;
    return pr;
}

}  // namespace subiso
