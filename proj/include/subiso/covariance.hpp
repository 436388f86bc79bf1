#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include "subiso/types.hpp"

namespace subiso {

struct CheckReport {
    bool psd = false;
    bool diagonal = false;
    bool trace = false;
    bool subisotropy = false;
    bool orthogonality = false;
    Residuals residuals;

    bool pass() const { return psd && diagonal && trace && subisotropy && orthogonality; }
};

// Finds U >= 0 with w'Uw = 0 for the rows of W, U_ii <= 1, Tr U >= a*n and
// U <= eta*diag(U). W must have orthonormal rows over n coordinates.
CovarianceCertificate find_subisotropic_covariance(const Eigen::MatrixXd& W, int n, double a, double eta,
                                                   double tol = 1e-7, int max_iters = 10000);

Residuals certificate_residuals(const Eigen::MatrixXd& U, const Eigen::MatrixXd& W, double a, double eta);

CheckReport verify_certificate(const CovarianceCertificate& cert, const Eigen::MatrixXd& W, double tol);

nlohmann::json certificate_to_json(const CovarianceCertificate& cert, const Eigen::MatrixXd& W);
// Returns the certificate and the rows stored alongside it (possibly empty).
std::pair<CovarianceCertificate, Eigen::MatrixXd> certificate_from_json(const nlohmann::json& j);

}  // namespace subiso
