#include <doctest.h>

#include <cmath>

#include "subiso/errors.hpp"
#include "subiso/generators.hpp"
#include "subiso/walk.hpp"

using namespace subiso;

TEST_CASE("orthonormal_basis")
{
    Eigen::MatrixXd a(2, 2);
    a << 1, 0, 0, 1;
    const Eigen::MatrixXd qa = orthonormal_basis(a, 1e-9);
    CHECK(qa.rows() == 2);
    CHECK((qa * qa.transpose() - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);

    Eigen::MatrixXd b(2, 2);
    b << 1, 1, 2, 2;
    const Eigen::MatrixXd qb = orthonormal_basis(b, 1e-9);
    REQUIRE(qb.rows() == 1);
    CHECK(std::abs(std::abs(qb(0, 0)) - 1 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(qb(0, 0) - qb(0, 1)) < 1e-12);

    // Exact elimination: (1,0,0) and (1,eps,0) are independent, but eps is
    // below the relative threshold, so the numerical rank is one.
    Eigen::MatrixXd c(2, 3);
    c << 1, 0, 0, 1, 1e-12, 0;
    CHECK(orthonormal_basis(c, 1e-9).rows() == 1);
    Eigen::MatrixXd d(2, 3);
    d << 1, 0, 0, 1, 1e-3, 0;
    CHECK(orthonormal_basis(d, 1e-9).rows() == 2);

    CHECK(orthonormal_basis(Eigen::MatrixXd(0, 3), 1e-9).rows() == 0);
}

TEST_CASE("psd_sqrt")
{
    CHECK(psd_sqrt(Eigen::MatrixXd::Identity(3, 3), 1e-9).isApprox(Eigen::MatrixXd::Identity(3, 3)));
    Eigen::MatrixXd d = Eigen::Vector2d(4, 9).asDiagonal();
    CHECK(psd_sqrt(d, 1e-9).isApprox(Eigen::MatrixXd(Eigen::Vector2d(2, 3).asDiagonal())));

    Rng rng(3);
    Eigen::MatrixXd g(8, 5);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 5; ++j)
            g(i, j) = rng.normal();
    const Eigen::MatrixXd U = g * g.transpose();
    const double tol = 1e-9;
    const Eigen::MatrixXd V = psd_sqrt(U, tol);
    CHECK((V * V - U).cwiseAbs().maxCoeff() <= 10 * tol * 8 * std::max(1.0, U.cwiseAbs().maxCoeff()));
    CHECK((V - V.transpose()).norm() < 1e-12);

    Eigen::MatrixXd neg = Eigen::Vector2d(1, -1).asDiagonal();
    CHECK_THROWS_AS(psd_sqrt(neg, 1e-9), NotPSD);
}

TEST_CASE("sample_direction")
{
    // Identity root: y equals the sign vector.
    Rng r1(9);
    Rng r2(9);
    const Eigen::VectorXd y = sample_direction(Eigen::MatrixXd::Identity(2, 2), r1);
    CHECK(y[0] == r2.sign());
    CHECK(y[1] == r2.sign());

    // All-ones 2x2: root U/sqrt(2), so r = (1,1) gives (sqrt2, sqrt2).
    const Eigen::MatrixXd root = psd_sqrt(Eigen::MatrixXd::Ones(2, 2), 1e-9);
    CHECK(root.isApprox(Eigen::MatrixXd::Ones(2, 2) / std::sqrt(2.0)));
    CHECK((root * Eigen::Vector2d(1, 1)).isApprox(Eigen::Vector2d(std::sqrt(2.0), std::sqrt(2.0))));

    // Sample covariance of the block certificate.
    Eigen::MatrixXd raw(2, 4);
    raw << 1, -1, 0, 0, 0, 0, 1, -1;
    const Eigen::MatrixXd W = orthonormal_basis(raw, 1e-9);
    const auto cert = find_subisotropic_covariance(W, 4, 0.05, 20.0 / 9);
    const Eigen::MatrixXd R = psd_sqrt(cert.U, 1e-7);
    Rng rng(77);
    const int N = 10000;
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(4, 4);
    for (int k = 0; k < N; ++k) {
        const Eigen::VectorXd v = sample_direction(R, rng);
        CHECK(v.norm() <= 4 + 1e-12);
        S += v * v.transpose();
    }
    S /= N;
    CHECK((S - cert.U).cwiseAbs().maxCoeff() <= 5.0 * 4 / std::sqrt(double(N)));
}

TEST_CASE("max_step_scale")
{
    FractionalState a(Eigen::VectorXd::Constant(1, 0.5));
    CHECK(max_step_scale(a, Eigen::VectorXd::Constant(1, 1), 10) == doctest::Approx(0.5));
    CHECK(max_step_scale(a, Eigen::VectorXd::Constant(1, 1), 0.01) == doctest::Approx(0.01));
    FractionalState b(Eigen::Vector2d(0.9, 0.5));
    CHECK(max_step_scale(b, Eigen::Vector2d(1, 1), 10) == doctest::Approx(0.1));
    CHECK_THROWS_AS(max_step_scale(b, Eigen::Vector2d(0, 0), 10), ZeroDirection);
}

TEST_CASE("integral start is returned unchanged")
{
    const Eigen::VectorXd x0 = Eigen::Vector4d(0, 1, 1, 0);
    const RoundingOutcome o = subiso_round(x0, trivial_oracle());
    CHECK(o.X == x0);
    CHECK(o.trace.empty());
    CHECK(subiso_round_energy_mode(x0, trivial_oracle()).X == x0);
}

TEST_CASE("frozen coordinates stay fixed and outcomes are integral")
{
    Eigen::VectorXd x0(5);
    x0 << 0, 0.3, 1, 0.7, 0.5;
    for (std::uint64_t s = 0; s < 50; ++s) {
        RoundParams p;
        p.seed = s;
        const RoundingOutcome o = subiso_round(x0, trivial_oracle(), p);
        CHECK(o.X[0] == 0);
        CHECK(o.X[2] == 1);
        for (int i = 0; i < 5; ++i)
            CHECK((o.X[i] == 0 || o.X[i] == 1));
    }
}

TEST_CASE("single coordinate is unbiased")
{
    const int N = 10000;
    for (bool energy : {false, true}) {
        int ones = 0;
        for (int s = 0; s < N; ++s) {
            RoundParams p;
            p.seed = derive_seed(5, static_cast<std::uint64_t>(s));
            p.record_trace = false;
            p.energy_mode = energy;
            ones += subiso_round(Eigen::VectorXd::Constant(1, 0.3), trivial_oracle(), p).X[0] > 0.5;
        }
        CHECK(std::abs(ones / double(N) - 0.3) <= 0.015);
    }
}

TEST_CASE("block rows keep blocks equal and unbiased")
{
    const BlockInstance b = gen_block_instance(4, 2);
    const OracleContract o = block_oracle(b);
    const int N = 10000;
    int first = 0, second = 0;
    for (int s = 0; s < N; ++s) {
        RoundParams p;
        p.seed = derive_seed(8, static_cast<std::uint64_t>(s));
        p.record_trace = false;
        const Eigen::VectorXd X = subiso_round(b.x0, o, p).X;
        REQUIRE(X[0] == X[1]);
        REQUIRE(X[2] == X[3]);
        first += X[0] > 0.5;
        second += X[2] > 0.5;
    }
    CHECK(std::abs(first / double(N) - 0.5) <= 0.02);
    CHECK(std::abs(second / double(N) - 0.5) <= 0.02);
}

TEST_CASE("constraint rows are conserved on every step")
{
    Rng rng(4);
    std::vector<SparseRow> rows;
    for (int r = 0; r < 3; ++r) {
        SparseRow row;
        for (int j = 0; j < 10; ++j)
            row.entries.push_back({j, rng.normal()});
        rows.push_back(row);
    }
    // Rows stay active only while all ten coordinates are alive.
    OracleContract base = rows_oracle(rows, 0.5);
    OracleContract o = base;
    Eigen::VectorXd last;
    std::vector<double> values;
    o.subspace = [&](const FractionalState& st, Rng& r) {
        if (st.n_alive() == 10) {
            if (last.size() > 0)
                for (std::size_t k = 0; k < rows.size(); ++k) {
                    double v = 0, w = 0;
                    for (const auto& [j, a] : rows[k].entries) {
                        v += a * st.x[j];
                        w += a * last[j];
                    }
                    CHECK(std::abs(v - w) <= 1e-7 * std::max(1.0, (st.x - last).norm()));
                }
            last = st.x;
            return base.subspace(st, r);
        }
        return SubspaceSpec{};
    };
    Eigen::VectorXd x0(10);
    for (int j = 0; j < 10; ++j)
        x0[j] = 0.1 + 0.08 * j;
    for (std::uint64_t s = 0; s < 20; ++s) {
        RoundParams p;
        p.seed = s;
        last.resize(0);
        const RoundingOutcome out = subiso_round(x0, o, p);
        for (int j = 0; j < 10; ++j)
            CHECK((out.X[j] == 0 || out.X[j] == 1));
    }
}

TEST_CASE("energy mode never decreases the energy")
{
    const int n = 8;
    const Eigen::VectorXd x0 = Eigen::VectorXd::LinSpaced(n, 0.2, 0.8);
    for (std::uint64_t s = 0; s < 30; ++s) {
        std::vector<std::pair<int, double>> seen;
        OracleContract o = trivial_oracle(0.5);
        const auto inner = o.subspace;
        o.subspace = [&](const FractionalState& st, Rng& r) {
            seen.push_back({st.n_alive(), st.x.squaredNorm()});
            return inner(st, r);
        };
        RoundParams p;
        p.seed = s;
        subiso_round_energy_mode(x0, o, p);
        // The extra row is active while n_k >= 4/delta = 8.
        for (std::size_t k = 1; k < seen.size(); ++k)
            if (seen[k - 1].first >= 8)
                CHECK(seen[k].second > seen[k - 1].second);
    }
}

TEST_CASE("rank above the declared slack throws")
{
    std::vector<SparseRow> rows{{{{0, 1.0}, {1, -1.0}}, "a"}, {{{1, 1.0}, {2, -1.0}}, "b"}};
    const OracleContract o = rows_oracle(rows, 0.5);
    CHECK_THROWS_AS(subiso_round(Eigen::Vector3d(0.5, 0.5, 0.5), o), OracleRankViolation);
}

TEST_CASE("faithful mode caps every step")
{
    const int n = 4;
    RoundParams p;
    p.gamma_mode = GammaMode::faithful;
    p.seed = 3;
    const RoundingOutcome o = subiso_round(Eigen::VectorXd::Constant(n, 0.5), trivial_oracle(), p);
    const double cap = 1 / (2 * std::pow(n, 1.5));
    for (const IterationRecord& rec : o.trace)
        CHECK(rec.gamma <= cap + 1e-15);
    CHECK(o.trace.size() > 4);
}
