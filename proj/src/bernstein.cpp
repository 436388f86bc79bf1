#include "subiso/bernstein.hpp"

#include "subiso/errors.hpp"

#include <cmath>

namespace subiso {

double bernstein_variance(const Eigen::VectorXd& a, const Eigen::VectorXd& x)
{
    if (a.size() != x.size())
        throw BadShape("coefficients and means differ in length");
    return (a.array().square() * (x.array() - x.array().square())).sum();
}

TailBound bernstein_tail_bound(const Eigen::VectorXd& a, const Eigen::VectorXd& x, double t, double beta)
{
    if (!(t >= 0) || !(beta >= 1))
        throw PreconditionViolated("need t >= 0 and beta >= 1");
    const double m = a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
    const double var = bernstein_variance(a, x);
    if (t == 0)
        return {1.0, false};
    // No alive randomness: a'X = a'x surely.
    if (var <= 0)
        return {0.0, true};
    return {std::exp(-(t * t / beta) / (2.0 * (var + m * t / 3.0))), false};
}

}  // namespace subiso
