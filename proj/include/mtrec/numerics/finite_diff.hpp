#pragma once

#include <functional>
#include <span>

namespace mtrec {

// Central-difference gradient check. loss_fn() evaluates the loss at the
// current parameter values; params is perturbed in place and restored.
// Returns max over parameters of |analytic - numeric| / max(1, |numeric|).
double finite_diff_check(std::span<double> params,
                         const std::function<double()>& loss_fn,
                         std::span<const double> analytic_grad,
                         double epsilon = 1e-5);

}  // namespace mtrec
