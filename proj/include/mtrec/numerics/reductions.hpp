#pragma once

#include <span>
#include <vector>

namespace mtrec {

// max(v) + log(sum exp(v - max(v))). Throws std::invalid_argument on empty
// input; safe for entries up to |v| ~ 1e300.
double logsumexp(std::span<const double> values);

// Normalized exponentials; entries in (0,1), sum within 1e-12 of 1.
std::vector<double> softmax(std::span<const double> values);
void softmax_inplace(std::span<double> values);

// Pinball (quantile) loss p_tau(u): tau*u for u >= 0, (tau-1)*u otherwise.
double pinball_loss(double tau, double u);
// Subgradient; the tau branch is used at u == 0.
double pinball_grad(double tau, double u);

// Sum in a fixed pairwise order, independent of chunking or thread count.
double pairwise_sum(std::span<const double> values);

}  // namespace mtrec
