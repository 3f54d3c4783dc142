#include "mtrec/numerics/finite_diff.hpp"

#include <cmath>
#include <stdexcept>

namespace mtrec {

double finite_diff_check(std::span<double> params,
                         const std::function<double()>& loss_fn,
                         std::span<const double> analytic_grad,
                         double epsilon) {
    if (params.size() != analytic_grad.size())
        throw std::invalid_argument("finite_diff_check: size mismatch");
    if (!(epsilon >= 1e-7 && epsilon <= 1e-3))
        throw std::invalid_argument("finite_diff_check: epsilon out of range");
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + epsilon;
        const double up = loss_fn();
        params[i] = saved - epsilon;
        const double down = loss_fn();
        params[i] = saved;
        const double numeric = (up - down) / (2.0 * epsilon);
        const double err =
            std::abs(analytic_grad[i] - numeric) / std::max(1.0, std::abs(numeric));
        if (err > worst) worst = err;
    }
    return worst;
}

}  // namespace mtrec
