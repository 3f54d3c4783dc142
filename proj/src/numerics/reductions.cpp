#include "mtrec/numerics/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mtrec {

double logsumexp(std::span<const double> values) {
    if (values.empty())
        throw std::invalid_argument("logsumexp: empty input");
    const double m = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(m)) {
        if (std::isnan(m)) throw std::invalid_argument("logsumexp: NaN input");
        return m;  // all -inf or a +inf dominates
    }
    double s = 0.0;
    for (double v : values) s += std::exp(v - m);
    return m + std::log(s);
}

std::vector<double> softmax(std::span<const double> values) {
    std::vector<double> out(values.begin(), values.end());
    softmax_inplace(out);
    return out;
}

void softmax_inplace(std::span<double> values) {
    if (values.empty())
        throw std::invalid_argument("softmax: empty input");
    const double m = *std::max_element(values.begin(), values.end());
    double s = 0.0;
    for (double& v : values) {
        v = std::exp(v - m);
        s += v;
    }
    for (double& v : values) v /= s;
}

double pinball_loss(double tau, double u) {
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument("pinball_loss: tau must be in (0,1)");
    return u >= 0.0 ? tau * u : (tau - 1.0) * u;
}

double pinball_grad(double tau, double u) {
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument("pinball_grad: tau must be in (0,1)");
    return u >= 0.0 ? tau : tau - 1.0;
}

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace mtrec
