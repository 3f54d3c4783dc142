#pragma once

#include <span>
#include <vector>

namespace mtrec {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// First-order adaptive optimizer with bias-corrected moment estimates.
class Adam {
public:
    Adam(std::size_t n_params, AdamConfig cfg = {});

    void step(std::span<double> params, std::span<const double> grads);
    long long steps() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

private:
    AdamConfig cfg_;
    std::vector<double> m_, v_;
    long long t_ = 0;
};

}  // namespace mtrec
