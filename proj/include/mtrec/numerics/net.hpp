#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mtrec/numerics/parallel.hpp"
#include "mtrec/numerics/rng.hpp"

namespace mtrec {

enum class Activation { identity, relu, sigmoid };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct LayerSpec {
    int in = 0;
    int out = 0;
    Activation act = Activation::identity;
};

// Dense feed-forward network with a flat 64-bit parameter store and explicit
// backward pass. Parameter layout per layer: weights row-major [out][in],
// then biases. The parameter count is fixed at construction.
class FeedForwardNet {
public:
    FeedForwardNet() = default;
    // He/Xavier-uniform weight init (by activation), zero biases.
    FeedForwardNet(int input_dim, const std::vector<int>& hidden, int output_dim,
                   Activation hidden_act, Activation output_act, SeededRng& rng);
    static FeedForwardNet from_spec(std::vector<LayerSpec> layers,
                                    std::vector<double> params);

    int input_width() const { return input_dim_; }
    int output_width() const;
    const std::vector<LayerSpec>& layers() const { return layers_; }
    std::span<const double> params() const { return params_; }
    std::span<double> params() { return params_; }
    std::size_t param_count() const { return params_.size(); }

    void forward(std::span<const double> x, std::vector<double>& y) const;
    std::vector<double> forward(std::span<const double> x) const;

    // Per-layer pre-activations and activations, reusable across samples.
    struct Trace {
        std::vector<double> input;
        std::vector<std::vector<double>> pre;
        std::vector<std::vector<double>> post;
    };
    void forward_trace(std::span<const double> x, Trace& t) const;
    const std::vector<double>& output(const Trace& t) const { return t.post.back(); }

    // Accumulates dLoss/dparams into grad given dLoss/doutput. grad must have
    // param_count() entries.
    void backward(const Trace& t, std::span<const double> dLdy,
                  std::span<double> grad) const;

private:
    std::vector<LayerSpec> layers_;
    std::vector<std::size_t> w_off_, b_off_;
    std::vector<double> params_;
    int input_dim_ = 0;

    void build_offsets();
};

// Mean loss and gradient over a batch of single-input samples.
// loss_fn(sample, outputs, dLdy) returns the per-sample loss and fills dLdy.
// The reduction runs in fixed-size blocks combined in block order, so serial
// and parallel execution produce bit-identical results.
struct BatchGrad {
    double loss = 0.0;
    std::vector<double> grad;
};
using SampleLoss =
    std::function<double(std::size_t, std::span<const double>, std::span<double>)>;

BatchGrad net_gradients(const FeedForwardNet& net, const double* inputs,
                        std::size_t n_samples, const SampleLoss& loss_fn,
                        Exec mode);

}  // namespace mtrec
