#include <doctest.h>

#include <cmath>

#include "subiso/covariance.hpp"
#include "subiso/errors.hpp"
#include "subiso/linalg.hpp"
#include "subiso/rng.hpp"

using namespace subiso;

namespace {

CovarianceCertificate manual(const Eigen::MatrixXd& U, double a, double eta)
{
    CovarianceCertificate c;
    c.U = U;
    c.a = a;
    c.eta = eta;
    return c;
}

// Orthonormal rows spanning `dim` random Gaussian directions in R^n.
Eigen::MatrixXd random_subspace(int dim, int n, Rng& rng)
{
    Eigen::MatrixXd g(dim, n);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < n; ++j)
            g(i, j) = rng.normal();
    return orthonormal_basis(g, 1e-9);
}

}  // namespace

TEST_CASE("no constraints: identity is accepted")
{
    const Eigen::MatrixXd W(0, 5);
    const auto c = find_subisotropic_covariance(W, 5, 0.1, 10.0 / 9);
    const auto r = verify_certificate(c, W, 1e-7);
    CHECK(r.pass());
    CHECK(c.U.trace() >= 0.5 - 1e-7);
    CHECK(verify_certificate(manual(Eigen::MatrixXd::Identity(5, 5), 0.1, 10.0 / 9), W, 1e-7).pass());
}

TEST_CASE("single difference row forces the all-ones direction")
{
    const double delta = 0.5, a = delta / 10, eta = 10 / (9 * delta);
    Eigen::MatrixXd W(1, 2);
    W << 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
    const auto c = find_subisotropic_covariance(W, 2, a, eta);
    CHECK(verify_certificate(c, W, 1e-7).pass());
    // The only feasible shape is c * [[1,1],[1,1]] with c in [a, 1].
    const double s = c.U(0, 0);
    CHECK(s >= a - 1e-7);
    CHECK(s <= 1 + 1e-7);
    CHECK((c.U - s * Eigen::MatrixXd::Ones(2, 2)).cwiseAbs().maxCoeff() < 1e-6);

    // The hand-solved family member passes, and needs eta >= 2.
    CHECK(verify_certificate(manual(0.5 * Eigen::MatrixXd::Ones(2, 2), a, eta), W, 1e-7).pass());
    CHECK_FALSE(verify_certificate(manual(0.5 * Eigen::MatrixXd::Ones(2, 2), a, 1.9), W, 1e-7).subisotropy);
}

TEST_CASE("block rows give fully correlated blocks")
{
    Eigen::MatrixXd raw(2, 4);
    raw << 1, -1, 0, 0, 0, 0, 1, -1;
    const Eigen::MatrixXd W = orthonormal_basis(raw, 1e-9);
    const double delta = 0.5;
    const auto c = find_subisotropic_covariance(W, 4, delta / 10, 10 / (9 * delta));
    CHECK(verify_certificate(c, W, 1e-7).pass());
    CHECK(std::abs(c.U(0, 0) - c.U(0, 1)) < 1e-6);
    CHECK(std::abs(c.U(2, 2) - c.U(2, 3)) < 1e-6);

    // Scan the two-parameter family c1*J (+) c2*J over a grid.
    for (double c1 = 0.1; c1 <= 1.0; c1 += 0.1)
        for (double c2 = 0.1; c2 <= 1.0; c2 += 0.1) {
            Eigen::MatrixXd U = Eigen::MatrixXd::Zero(4, 4);
            U.topLeftCorner(2, 2).setConstant(c1);
            U.bottomRightCorner(2, 2).setConstant(c2);
            CHECK(verify_certificate(manual(U, 0.05, 2.0), W, 1e-7).pass());
            CHECK_FALSE(verify_certificate(manual(U, 0.05, 1.9), W, 1e-7).subisotropy);
        }
}

TEST_CASE("verify_certificate failure modes")
{
    const Eigen::MatrixXd none(0, 3);
    const auto ones = verify_certificate(manual(Eigen::MatrixXd::Ones(3, 3), 0.1, 2.0), none, 1e-7);
    CHECK_FALSE(ones.subisotropy);
    CHECK(ones.residuals.min_eig_subiso == doctest::Approx(-1.0));
    CHECK(verify_certificate(manual(Eigen::MatrixXd::Ones(3, 3), 0.1, 3.0), none, 1e-7).subisotropy);

    Eigen::MatrixXd W(1, 2);
    W << 1, 0;
    const auto orth = verify_certificate(manual(Eigen::MatrixXd::Identity(2, 2), 0.1, 1.5), W, 1e-7);
    CHECK_FALSE(orth.orthogonality);
    CHECK(orth.residuals.max_orthogonality == doctest::Approx(1.0));

    CHECK_FALSE(verify_certificate(manual(2 * Eigen::MatrixXd::Identity(2, 2), 0.1, 1.5), none.leftCols(2), 1e-7)
                    .diagonal);
    CHECK_FALSE(verify_certificate(manual(0.01 * Eigen::MatrixXd::Identity(2, 2), 0.5, 1.5), none.leftCols(2), 1e-7)
                    .trace);
    Eigen::MatrixXd indefinite(2, 2);
    indefinite << 0.5, 0.9, 0.9, 0.5;
    CHECK_FALSE(verify_certificate(manual(indefinite, 0.1, 10), none.leftCols(2), 1e-7).psd);
}

TEST_CASE("infeasible parameters are rejected")
{
    Eigen::MatrixXd W(1, 2);
    W << 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
    // delta = 1/2 but 1/eta + a = 0.9 + 0.1 > 1/2
    CHECK_THROWS_AS(find_subisotropic_covariance(W, 2, 0.1, 10.0 / 9), Infeasible);
}

TEST_CASE("random subspaces in the feasible regime certify")
{
    Rng rng(2024);
    for (double delta : {0.1, 0.25, 0.5}) {
        for (int trial = 0; trial < 6; ++trial) {
            const int n = 2 + static_cast<int>(rng.uniform_int(23));
            const int dim = static_cast<int>(std::floor((1 - delta) * n));
            const Eigen::MatrixXd W = random_subspace(dim, n, rng);
            const double d = 1 - static_cast<double>(W.rows()) / n;
            const double a = delta / 10, eta = 10 / (9 * delta);
            REQUIRE(d >= delta - 1e-12);
            const auto c = find_subisotropic_covariance(W, n, a, eta);
            const auto r = verify_certificate(c, W, 1e-7);
            CHECK(r.pass());
        }
    }
}

TEST_CASE("certificate json round trip")
{
    Eigen::MatrixXd W(1, 3);
    W << 1, 0, 0;
    const auto c = find_subisotropic_covariance(W, 3, 0.05, 10.0 / 9 * 1.5);
    const auto [back, W2] = certificate_from_json(certificate_to_json(c, W));
    CHECK(back.U == c.U);
    CHECK(back.a == c.a);
    CHECK(back.eta == c.eta);
    CHECK(W2 == W);
    CHECK(verify_certificate(back, W2, 1e-7).pass());
}
