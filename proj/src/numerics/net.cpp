#include "mtrec/numerics/net.hpp"

#include <cmath>
#include <stdexcept>

#include "mtrec/common.hpp"

namespace mtrec {

namespace {
constexpr std::size_t kGradBlock = 64;

double activate(Activation a, double z) {
    switch (a) {
        case Activation::identity: return z;
        case Activation::relu: return z > 0.0 ? z : 0.0;
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    }
    return z;
}

// Derivative from the pre-activation and activation value.
double activate_grad(Activation a, double z, double y) {
    switch (a) {
        case Activation::identity: return 1.0;
        case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::sigmoid: return y * (1.0 - y);
    }
    return 1.0;
}
}  // namespace

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
    }
    return "identity";
}

Activation activation_from_name(const std::string& name) {
    if (name == "identity") return Activation::identity;
    if (name == "relu") return Activation::relu;
    if (name == "sigmoid") return Activation::sigmoid;
    throw io_error("unknown activation: " + name);
}

FeedForwardNet::FeedForwardNet(int input_dim, const std::vector<int>& hidden,
                               int output_dim, Activation hidden_act,
                               Activation output_act, SeededRng& rng)
    : input_dim_(input_dim) {
    if (input_dim <= 0 || output_dim <= 0)
        throw std::invalid_argument("FeedForwardNet: dimensions must be positive");
    int prev = input_dim;
    for (int h : hidden) {
        if (h <= 0) throw std::invalid_argument("FeedForwardNet: bad hidden width");
        layers_.push_back({prev, h, hidden_act});
        prev = h;
    }
    layers_.push_back({prev, output_dim, output_act});
    build_offsets();
    // He-uniform for relu layers, Xavier-uniform otherwise; biases zero.
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& spec = layers_[l];
        const double bound =
            spec.act == Activation::relu
                ? std::sqrt(6.0 / spec.in)
                : std::sqrt(6.0 / (spec.in + spec.out));
        double* w = params_.data() + w_off_[l];
        for (int i = 0; i < spec.in * spec.out; ++i) w[i] = rng.uniform(-bound, bound);
    }
}

FeedForwardNet FeedForwardNet::from_spec(std::vector<LayerSpec> layers,
                                          std::vector<double> params) {
    if (layers.empty()) throw std::invalid_argument("from_spec: no layers");
    FeedForwardNet net;
    net.layers_ = std::move(layers);
    net.input_dim_ = net.layers_.front().in;
    for (std::size_t l = 1; l < net.layers_.size(); ++l)
        if (net.layers_[l].in != net.layers_[l - 1].out)
            throw std::invalid_argument("from_spec: inconsistent layer widths");
    net.build_offsets();
    if (params.size() != net.params_.size())
        throw std::invalid_argument("from_spec: parameter count mismatch");
    net.params_ = std::move(params);
    return net;
}

void FeedForwardNet::build_offsets() {
    std::size_t off = 0;
    for (const auto& spec : layers_) {
        w_off_.push_back(off);
        off += static_cast<std::size_t>(spec.in) * spec.out;
        b_off_.push_back(off);
        off += spec.out;
    }
    params_.assign(off, 0.0);
}

int FeedForwardNet::output_width() const {
    return layers_.empty() ? 0 : layers_.back().out;
}

void FeedForwardNet::forward(std::span<const double> x, std::vector<double>& y) const {
    if (static_cast<int>(x.size()) != input_dim_)
        throw std::invalid_argument("forward: input width mismatch");
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> next;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& spec = layers_[l];
        const double* w = params_.data() + w_off_[l];
        const double* b = params_.data() + b_off_[l];
        next.assign(spec.out, 0.0);
        for (int j = 0; j < spec.out; ++j) {
            double z = b[j];
            const double* wr = w + static_cast<std::size_t>(j) * spec.in;
            for (int i = 0; i < spec.in; ++i) z += wr[i] * cur[i];
            next[j] = activate(spec.act, z);
        }
        cur.swap(next);
    }
    y = std::move(cur);
}

std::vector<double> FeedForwardNet::forward(std::span<const double> x) const {
    std::vector<double> y;
    forward(x, y);
    return y;
}

void FeedForwardNet::forward_trace(std::span<const double> x, Trace& t) const {
    if (static_cast<int>(x.size()) != input_dim_)
        throw std::invalid_argument("forward_trace: input width mismatch");
    t.input.assign(x.begin(), x.end());
    t.pre.resize(layers_.size());
    t.post.resize(layers_.size());
    const std::vector<double>* cur = &t.input;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& spec = layers_[l];
        const double* w = params_.data() + w_off_[l];
        const double* b = params_.data() + b_off_[l];
        auto& pre = t.pre[l];
        auto& post = t.post[l];
        pre.assign(spec.out, 0.0);
        post.assign(spec.out, 0.0);
        for (int j = 0; j < spec.out; ++j) {
            double z = b[j];
            const double* wr = w + static_cast<std::size_t>(j) * spec.in;
            for (int i = 0; i < spec.in; ++i) z += wr[i] * (*cur)[i];
            pre[j] = z;
            post[j] = activate(spec.act, z);
        }
        cur = &post;
    }
}

void FeedForwardNet::backward(const Trace& t, std::span<const double> dLdy,
                              std::span<double> grad) const {
    if (grad.size() != params_.size())
        throw std::invalid_argument("backward: gradient size mismatch");
    if (static_cast<int>(dLdy.size()) != output_width())
        throw std::invalid_argument("backward: output gradient width mismatch");
    std::vector<double> delta(dLdy.begin(), dLdy.end());
    std::vector<double> prev_delta;
    for (std::size_t li = layers_.size(); li-- > 0;) {
        const auto& spec = layers_[li];
        const auto& pre = t.pre[li];
        const auto& post = t.post[li];
        const std::vector<double>& below = li == 0 ? t.input : t.post[li - 1];
        for (int j = 0; j < spec.out; ++j)
            delta[j] *= activate_grad(spec.act, pre[j], post[j]);
        double* dw = grad.data() + w_off_[li];
        double* db = grad.data() + b_off_[li];
        for (int j = 0; j < spec.out; ++j) {
            const double d = delta[j];
            double* dwr = dw + static_cast<std::size_t>(j) * spec.in;
            for (int i = 0; i < spec.in; ++i) dwr[i] += d * below[i];
            db[j] += d;
        }
        if (li == 0) break;
        prev_delta.assign(spec.in, 0.0);
        const double* w = params_.data() + w_off_[li];
        for (int j = 0; j < spec.out; ++j) {
            const double d = delta[j];
            const double* wr = w + static_cast<std::size_t>(j) * spec.in;
            for (int i = 0; i < spec.in; ++i) prev_delta[i] += d * wr[i];
        }
        delta.swap(prev_delta);
    }
}

BatchGrad net_gradients(const FeedForwardNet& net, const double* inputs,
                        std::size_t n_samples, const SampleLoss& loss_fn,
                        Exec mode) {
    if (n_samples == 0)
        throw std::invalid_argument("net_gradients: empty batch");
    const std::size_t p = net.param_count();
    const std::size_t in_w = static_cast<std::size_t>(net.input_width());
    const std::size_t out_w = static_cast<std::size_t>(net.output_width());
    const std::size_t nblocks = block_count(n_samples, kGradBlock);

    std::vector<std::vector<double>> block_grads(nblocks);
    std::vector<double> block_loss(nblocks, 0.0);

    for_blocks(n_samples, kGradBlock, mode,
               [&](std::size_t lo, std::size_t hi, std::size_t b) {
                   auto& g = block_grads[b];
                   g.assign(p, 0.0);
                   FeedForwardNet::Trace trace;
                   std::vector<double> dLdy(out_w);
                   double loss = 0.0;
                   for (std::size_t s = lo; s < hi; ++s) {
                       net.forward_trace({inputs + s * in_w, in_w}, trace);
                       std::fill(dLdy.begin(), dLdy.end(), 0.0);
                       const double l =
                           loss_fn(s, net.output(trace), dLdy);
                       if (!std::isfinite(l))
                           throw numeric_error(
                               "net_gradients: non-finite loss at batch index " +
                                   std::to_string(s),
                               static_cast<long long>(s));
                       loss += l;
                       net.backward(trace, dLdy, g);
                   }
                   block_loss[b] = loss;
               });

    BatchGrad out;
    out.grad.assign(p, 0.0);
    double total = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b) {
        total += block_loss[b];
        const auto& g = block_grads[b];
        for (std::size_t i = 0; i < p; ++i) out.grad[i] += g[i];
    }
    const double inv = 1.0 / static_cast<double>(n_samples);
    out.loss = total * inv;
    for (double& g : out.grad) g *= inv;
    return out;
}

}  // namespace mtrec
