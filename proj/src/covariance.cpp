#include "subiso/covariance.hpp"

#include "subiso/errors.hpp"
#include "subiso/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace subiso {

namespace {

// Leverage target overshoot, per-iteration weight overshoot, iterations a
// coordinate may stay low before it can be excluded, and the diagonal ratio
// and weight spread that trigger exclusion.
constexpr double kMargin = 1e-3;
constexpr double kOvershoot = 0.05;
constexpr int kStallLimit = 30;
constexpr double kExcludeRatio = 1e-8;
constexpr double kMaxSpread = 1e-10;
constexpr double kNullRow = 1e-10;

// Removes coordinate i from the column space of B: B <- B*H with H an
// orthonormal basis of B.row(i)^perp.
void exclude_row(Eigen::MatrixXd& B, int i)
{
    const Eigen::RowVectorXd b = B.row(i).normalized();
    const Eigen::MatrixXd H = complement_basis(b, B.cols());
    B = (B * H).eval();
    B.row(i).setZero();
}

struct Factor {
    Eigen::MatrixXd R;
    Eigen::VectorXd lev;
};

Factor factor(const Eigen::MatrixXd& B, const Eigen::VectorXd& w)
{
    const Eigen::Index n = B.rows(), k = B.cols();
    Eigen::MatrixXd S = w.cwiseSqrt().asDiagonal() * B;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(S);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
    return {qr.matrixQR().topRows(k).triangularView<Eigen::Upper>(), Q.rowwise().squaredNorm()};
}

}  // namespace

Residuals certificate_residuals(const Eigen::MatrixXd& U, const Eigen::MatrixXd& W, double a, double eta)
{
    Residuals r;
    const Eigen::Index n = U.rows();
    const Eigen::VectorXd d = U.diagonal();
    r.min_eig_u = min_eigenvalue(U);
    Eigen::MatrixXd S = -U;
    S.diagonal() += eta * d;
    r.min_eig_subiso = min_eigenvalue(S);
    r.trace_slack = d.sum() - a * static_cast<double>(n);
    r.max_orthogonality = W.rows() ? (W * U).cwiseProduct(W).rowwise().sum().cwiseAbs().maxCoeff() : 0.0;
    r.max_diag_excess = n ? d.maxCoeff() - 1.0 : -1.0;
    return r;
}

CheckReport verify_certificate(const CovarianceCertificate& cert, const Eigen::MatrixXd& W, double tol)
{
    if (cert.U.rows() != cert.U.cols() || (W.rows() > 0 && W.cols() != cert.U.rows()))
        throw BadShape("certificate and rows disagree in dimension");
    CheckReport rep;
    rep.residuals = certificate_residuals(cert.U, W, cert.a, cert.eta);
    const Residuals& r = rep.residuals;
    rep.psd = r.min_eig_u >= -tol;
    rep.subisotropy = r.min_eig_subiso >= -tol;
    rep.trace = r.trace_slack >= -tol;
    rep.orthogonality = r.max_orthogonality <= tol;
    rep.diagonal = r.max_diag_excess <= tol;
    return rep;
}

CovarianceCertificate find_subisotropic_covariance(const Eigen::MatrixXd& W, int n, double a, double eta,
                                                   double tol, int max_iters)
{
    if (W.rows() > 0 && W.cols() != n)
        throw BadShape("rows have " + std::to_string(W.cols()) + " columns, expected " + std::to_string(n));
    const double delta = n > 0 ? 1.0 - static_cast<double>(W.rows()) / n : 0.0;
    if (!(a > 0) || !(eta > 1) || 1.0 / eta + a > delta + 1e-12) {
        std::ostringstream os;
        os << "1/eta + a = " << 1.0 / eta + a << " exceeds slack " << delta;
        throw Infeasible(os.str());
    }

    CovarianceCertificate cert;
    cert.a = a;
    cert.eta = eta;

    Eigen::MatrixXd B = complement_basis(W, n);
    std::vector<char> excluded(n, 0);
    // Coordinates already (numerically) inside span(W) carry no weight.
    for (int i = 0; i < n; ++i)
        if (B.row(i).norm() <= kNullRow)
            excluded[i] = 1;

    const double target = (1.0 + kMargin) / eta;
    Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
    for (int i = 0; i < n; ++i)
        if (excluded[i])
            w[i] = 0;
    std::vector<int> stall(n, 0);

    Factor f;
    int it = 0;
    bool converged = false;
    while (B.cols() > 0) {
        f = factor(B, w);
        std::vector<int> low;
        for (int i = 0; i < n; ++i) {
            if (!excluded[i] && f.lev[i] < target) {
                low.push_back(i);
                ++stall[i];
            } else {
                stall[i] = 0;
            }
        }
        if (low.empty()) {
            converged = true;
            break;
        }
        if (it >= max_iters)
            break;

        double dmax = 0, wmin = std::numeric_limits<double>::infinity(), wmax = 0;
        for (int i = 0; i < n; ++i)
            if (!excluded[i]) {
                dmax = std::max(dmax, f.lev[i] / w[i]);
                wmin = std::min(wmin, w[i]);
                wmax = std::max(wmax, w[i]);
            }
        const bool spread = wmin < kMaxSpread * wmax;
        int victim = -1;
        double vd = std::numeric_limits<double>::infinity();
        for (int i : low) {
            const double d = f.lev[i] / w[i];
            if ((spread || (stall[i] >= kStallLimit && d < kExcludeRatio * dmax)) && d < vd) {
                vd = d;
                victim = i;
            }
        }
        ++it;
        if (victim >= 0) {
            exclude_row(B, victim);
            ++cert.excluded;
            for (int i = 0; i < n; ++i)
                if (i == victim || B.row(i).norm() <= kNullRow) {
                    excluded[i] = 1;
                    w[i] = 0;
                }
            std::fill(stall.begin(), stall.end(), 0);
            continue;
        }
        for (int i : low)
            w[i] *= target / f.lev[i] * (1.0 + kOvershoot);
        w /= wmax > 0 ? w.maxCoeff() : 1.0;
    }
    cert.iterations = it;

    if (B.cols() == 0) {
        cert.U = Eigen::MatrixXd::Zero(n, n);
    } else {
        if (!converged)
            f = factor(B, w);
        // U = B (B'WB)^{-1} B' = F F' with F = B R^{-1}.
        const Eigen::MatrixXd F = f.R.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(B);
        cert.U = F * F.transpose();
        const double dmax = cert.U.diagonal().maxCoeff();
        if (dmax > 0)
            cert.U /= dmax;
        cert.U = (0.5 * (cert.U + cert.U.transpose())).eval();
    }

    const CheckReport rep = verify_certificate(cert, W, tol);
    cert.residuals = rep.residuals;
    if (!rep.pass()) {
        std::ostringstream os;
        os << (converged ? "certificate rejected" : B.cols() == 0 ? "complement exhausted" : "iteration limit reached")
           << " after " << it
           << " iterations (" << cert.excluded << " excluded)";
        throw NoConvergence(os.str(), rep.residuals, it);
    }
    return cert;
}

nlohmann::json certificate_to_json(const CovarianceCertificate& cert, const Eigen::MatrixXd& W)
{
    const Eigen::Index n = cert.U.rows();
    std::vector<double> u(static_cast<std::size_t>(n * n));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            u[static_cast<std::size_t>(i * n + j)] = cert.U(i, j);
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(W.cols()));
        for (Eigen::Index c = 0; c < W.cols(); ++c)
            row[static_cast<std::size_t>(c)] = W(r, c);
        rows.push_back(row);
    }
    const Residuals& r = cert.residuals;
    return {{"schema", "subiso/1"},
            {"n", n},
            {"U", u},
            {"a", cert.a},
            {"eta", cert.eta},
            {"W", rows},
            {"residuals",
             {{"min_eig_u", r.min_eig_u},
              {"min_eig_subiso", r.min_eig_subiso},
              {"trace_slack", r.trace_slack},
              {"max_orthogonality", r.max_orthogonality},
              {"max_diag_excess", r.max_diag_excess}}}};
}

std::pair<CovarianceCertificate, Eigen::MatrixXd> certificate_from_json(const nlohmann::json& j)
{
    CovarianceCertificate cert;
    const auto n = j.at("n").get<Eigen::Index>();
    const auto u = j.at("U").get<std::vector<double>>();
    if (n < 0 || static_cast<Eigen::Index>(u.size()) != n * n)
        throw BadShape("U must hold n*n entries");
    cert.U.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k)
            cert.U(i, k) = u[static_cast<std::size_t>(i * n + k)];
    cert.a = j.at("a").get<double>();
    cert.eta = j.at("eta").get<double>();
    Eigen::MatrixXd W(0, n);
    if (j.contains("W")) {
        const auto rows = j.at("W").get<std::vector<std::vector<double>>>();
        W.resize(static_cast<Eigen::Index>(rows.size()), n);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (static_cast<Eigen::Index>(rows[r].size()) != n)
                throw BadShape("row length differs from n");
            for (Eigen::Index c = 0; c < n; ++c)
                W(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
        }
    }
    return {cert, W};
}

}  // namespace subiso
