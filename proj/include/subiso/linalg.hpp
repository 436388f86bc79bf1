#pragma once

#include <Eigen/Dense>

#include <string>

#include "subiso/errors.hpp"

namespace subiso {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Orthonormal rows spanning the row space of `rows`. Rows are normalized first,
// so tol acts as a relative rank threshold.
template <typename Derived>
MatrixX<typename Derived::Scalar> orthonormal_basis(const Eigen::MatrixBase<Derived>& rows,
                                                     typename Derived::Scalar tol)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index m = rows.cols();
    MatrixX<Scalar> cols(m, rows.rows());
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        const Scalar nrm = rows.row(i).norm();
        if (nrm > Scalar(0))
            cols.col(c++) = rows.row(i).transpose() / nrm;
    }
    if (c == 0)
        return MatrixX<Scalar>(0, m);
    cols.conservativeResize(m, c);

    Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(cols);
    qr.setThreshold(tol);
    const Eigen::Index r = qr.rank();
    MatrixX<Scalar> q = qr.householderQ() * MatrixX<Scalar>::Identity(m, r);
    return q.transpose();
}

// Orthonormal basis (as columns) of the orthogonal complement of orthonormal rows W in R^n.
template <typename Derived>
MatrixX<typename Derived::Scalar> complement_basis(const Eigen::MatrixBase<Derived>& w, Eigen::Index n)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index r = w.rows();
    if (r == 0)
        return MatrixX<Scalar>::Identity(n, n);
    Eigen::HouseholderQR<MatrixX<Scalar>> qr(w.transpose());
    MatrixX<Scalar> q = qr.householderQ();
    return q.rightCols(n - r);
}

template <typename Derived>
typename Derived::Scalar min_eigenvalue(const Eigen::MatrixBase<Derived>& m)
{
    using Scalar = typename Derived::Scalar;
    if (m.rows() == 0)
        return Scalar(0);
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

template <typename Derived>
MatrixX<typename Derived::Scalar> psd_sqrt(const Eigen::MatrixBase<Derived>& u, typename Derived::Scalar tol)
{
    using Scalar = typename Derived::Scalar;
    if (u.rows() != u.cols())
        throw BadShape("psd_sqrt needs a square matrix");
    if (u.rows() == 0)
        return MatrixX<Scalar>(0, 0);
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(u);
    const Scalar lo = es.eigenvalues().minCoeff();
    if (lo < -tol)
        throw NotPSD("min eigenvalue " + std::to_string(static_cast<double>(lo)));
    const VectorX<Scalar> s = es.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt();
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace subiso
