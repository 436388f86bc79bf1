#include "subiso/types.hpp"
#include "subiso/errors.hpp"

#include <algorithm>
#include <cmath>

namespace subiso {

FractionalState::FractionalState(Eigen::VectorXd x0, double tol) : x(std::move(x0)), integrality_tol(tol)
{
    const int n = static_cast<int>(x.size());
    frozen_values.assign(n, -1);
    alive.reserve(n);
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(x[i]) || x[i] < -tol || x[i] > 1 + tol)
            throw PreconditionViolated("x0[" + std::to_string(i) + "] outside [0,1]");
        alive.push_back(i);
    }
    snap();
}

void FractionalState::freeze(int i, int value)
{
    if (!is_alive(i))
        return;
    x[i] = value;
    frozen_values[i] = value;
    alive.erase(std::lower_bound(alive.begin(), alive.end(), i));
}

std::vector<int> FractionalState::snap()
{
    std::vector<int> hit;
    std::vector<int> keep;
    keep.reserve(alive.size());
    for (int i : alive) {
        if (x[i] <= integrality_tol) {
            x[i] = 0;
            frozen_values[i] = 0;
            hit.push_back(i);
        } else if (x[i] >= 1 - integrality_tol) {
            x[i] = 1;
            frozen_values[i] = 1;
            hit.push_back(i);
        } else {
            keep.push_back(i);
        }
    }
    alive.swap(keep);
    return hit;
}

Eigen::VectorXd FractionalState::alive_values() const
{
    Eigen::VectorXd v(alive.size());
    for (std::size_t k = 0; k < alive.size(); ++k)
        v[static_cast<Eigen::Index>(k)] = x[alive[k]];
    return v;
}

}  // namespace subiso
