#include "dvnet/layers.hpp"

#include <algorithm>
#include <cmath>

#include "dvnet/error.hpp"

namespace dvnet {

const char* act_name(ActKind kind) {
    switch (kind) {
        case ActKind::sigmoid: return "sigmoid";
        case ActKind::tanh: return "tanh";
        case ActKind::relu: return "relu";
    }
    return "?";
}

Tensor apply_activation(ActKind kind, const Tensor& x) {
    Tensor out = x;
    switch (kind) {
        case ActKind::sigmoid:
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-out[i]));
            break;
        case ActKind::tanh:
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
            break;
        case ActKind::relu:
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
            break;
    }
    return out;
}

Tensor activation_backward(ActKind kind, const Tensor& x, const Tensor& upstream) {
    if (!x.same_shape(upstream)) {
        throw ShapeError("activation_backward: shape mismatch " + shape_str(x.shape()) +
                         " vs " + shape_str(upstream.shape()));
    }
    Tensor out = upstream;
    switch (kind) {
        case ActKind::sigmoid:
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double s = 1.0 / (1.0 + std::exp(-x[i]));
                out[i] *= s * (1.0 - s);
            }
            break;
        case ActKind::tanh:
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double t = std::tanh(x[i]);
                out[i] *= 1.0 - t * t;
            }
            break;
        case ActKind::relu:
            for (std::size_t i = 0; i < out.size(); ++i) {
                if (x[i] <= 0.0) out[i] = 0.0;  // derivative at 0 defined as 0
            }
            break;
    }
    return out;
}

MaxPoolResult maxpool2x2(const Tensor& x) {
    if (x.rank() != 3) {
        throw ShapeError("maxpool2x2 expects [C,H,W], got " + shape_str(x.shape()));
    }
    const std::size_t c = x.extent(0), h = x.extent(1), w = x.extent(2);
    if (h % 2 != 0 || w % 2 != 0) {
        throw ShapeError("maxpool2x2 requires even extents, got " + shape_str(x.shape()));
    }
    const std::size_t oh = h / 2, ow = w / 2;
    MaxPoolResult result{Tensor({c, oh, ow}), std::vector<std::size_t>(c * oh * ow)};
    const double* pi = x.data();
    double* po = result.output.data();
    for (std::size_t ch = 0; ch < c; ++ch) {
        const double* imap = pi + ch * h * w;
        for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t xx = 0; xx < ow; ++xx) {
                const std::size_t base = (2 * y) * w + 2 * xx;
                std::size_t best = base;
                double bv = imap[base];
                const std::size_t candidates[3] = {base + 1, base + w, base + w + 1};
                for (std::size_t cand : candidates) {
                    if (imap[cand] > bv) {
                        bv = imap[cand];
                        best = cand;
                    }
                }
                const std::size_t oidx = (ch * oh + y) * ow + xx;
                po[oidx] = bv;
                result.argmax[oidx] = ch * h * w + best;
            }
        }
    }
    return result;
}

Tensor maxpool2x2_backward(const std::vector<std::size_t>& argmax,
                           const std::vector<std::size_t>& input_shape,
                           const Tensor& upstream) {
    if (upstream.size() != argmax.size()) {
        throw ShapeError("maxpool2x2_backward: upstream size does not match pooling mask");
    }
    Tensor gin(input_shape);
    for (std::size_t i = 0; i < argmax.size(); ++i) gin[argmax[i]] += upstream[i];
    return gin;
}

Tensor dense_forward(const Tensor& x, const Tensor& weights, const Tensor& bias) {
    if (x.rank() != 1 || weights.rank() != 2 || bias.rank() != 1) {
        throw ShapeError("dense_forward expects x [n_in], W [n_out,n_in], b [n_out]; got " +
                         shape_str(x.shape()) + ", " + shape_str(weights.shape()) + ", " +
                         shape_str(bias.shape()));
    }
    const std::size_t n_out = weights.extent(0), n_in = weights.extent(1);
    if (x.extent(0) != n_in || bias.extent(0) != n_out) {
        throw ShapeError("dense_forward shape mismatch: x " + shape_str(x.shape()) +
                         ", W " + shape_str(weights.shape()) + ", b " + shape_str(bias.shape()));
    }
    Tensor out({n_out});
    const double* pw = weights.data();
    const double* px = x.data();
    for (std::size_t o = 0; o < n_out; ++o) {
        out[o] = bias[o] + detail::dot(pw + o * n_in, px, n_in);
    }
    return out;
}

Tensor softmax(const Tensor& logits) {
    Tensor out = logits;
    double mx = out[0];
    for (std::size_t i = 1; i < out.size(); ++i) mx = std::max(mx, out[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::exp(out[i] - mx);
        sum += out[i];
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] /= sum;
    return out;
}

SoftmaxLoss softmax_cross_entropy(const Tensor& logits, std::size_t target_class) {
    if (logits.rank() != 1) {
        throw ShapeError("softmax_cross_entropy expects rank-1 logits, got " +
                         shape_str(logits.shape()));
    }
    if (target_class >= logits.extent(0)) {
        throw IndexError("softmax_cross_entropy: target class " + std::to_string(target_class) +
                         " out of range for " + std::to_string(logits.extent(0)) + " classes");
    }
    SoftmaxLoss result{0.0, Tensor(), softmax(logits)};
    result.loss = -std::log(result.probs[target_class]);
    result.grad_logits = result.probs;
    result.grad_logits[target_class] -= 1.0;
    return result;
}

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) throw ParamError("TrainConfig: learning_rate must be > 0");
    if (batch_size < 1) throw ParamError("TrainConfig: batch_size must be >= 1");
    if (l2_weight < 0.0) throw ParamError("TrainConfig: l2_weight must be >= 0");
}

void sgd_step(const std::vector<Tensor*>& params, const std::vector<Tensor*>& grads,
              const TrainConfig& config) {
    config.validate();
    if (params.size() != grads.size()) {
        throw ShapeError("sgd_step: parameter/gradient list size mismatch");
    }
    for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor& param = *params[p];
        const Tensor& grad = *grads[p];
        if (!param.same_shape(grad)) {
            throw ShapeError("sgd_step: shape mismatch " + shape_str(param.shape()) +
                             " vs " + shape_str(grad.shape()));
        }
        for (std::size_t i = 0; i < param.size(); ++i) {
            param[i] -= config.learning_rate * (grad[i] + config.l2_weight * param[i]);
        }
    }
}

Conv2dLayer::Conv2dLayer(std::size_t in_channels, std::size_t out_channels,
                         std::size_t kh, std::size_t kw)
    : weights_({out_channels, in_channels, kh, kw}),
      bias_({out_channels}),
      grad_weights_({out_channels, in_channels, kh, kw}),
      grad_bias_({out_channels}) {}

void Conv2dLayer::init_glorot(SplitMix64& rng) {
    const std::size_t kh = weights_.extent(2), kw = weights_.extent(3);
    const double fan_in = static_cast<double>(weights_.extent(1) * kh * kw);
    const double fan_out = static_cast<double>(weights_.extent(0) * kh * kw);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] = rng.uniform(-limit, limit);
    for (std::size_t i = 0; i < bias_.size(); ++i) bias_[i] = 0.0;
}

std::vector<std::size_t> Conv2dLayer::out_shape(const std::vector<std::size_t>& in) const {
    if (in.size() != 3 || in[0] != weights_.extent(1)) {
        throw ShapeError("conv layer expects input [" + std::to_string(weights_.extent(1)) +
                         ",H,W], got " + shape_str(in));
    }
    const std::size_t kh = weights_.extent(2), kw = weights_.extent(3);
    if (kh > in[1] || kw > in[2]) {
        throw ShapeError("conv kernel " + shape_str(weights_.shape()) +
                         " larger than input " + shape_str(in));
    }
    return {weights_.extent(0), in[1] - kh + 1, in[2] - kw + 1};
}

Tensor Conv2dLayer::forward(const Tensor& x) {
    cached_input_ = x;
    return conv2d_valid(x, weights_, bias_);
}

Tensor Conv2dLayer::forward_pure(const Tensor& x) const {
    return conv2d_valid(x, weights_, bias_);
}

Tensor Conv2dLayer::backward(const Tensor& grad_out) {
    conv2d_grad_params(grad_out, cached_input_, grad_weights_, grad_bias_);
    return conv2d_grad_input(grad_out, weights_, cached_input_.extent(1), cached_input_.extent(2));
}

Tensor ActivationLayer::forward(const Tensor& x) {
    cached_input_ = x;
    return apply_activation(kind_, x);
}

Tensor ActivationLayer::backward(const Tensor& grad_out) {
    return activation_backward(kind_, cached_input_, grad_out);
}

std::vector<std::size_t> MaxPoolLayer::out_shape(const std::vector<std::size_t>& in) const {
    if (in.size() != 3) throw ShapeError("maxpool expects [C,H,W], got " + shape_str(in));
    if (in[1] % 2 != 0 || in[2] % 2 != 0) {
        throw ShapeError("maxpool requires even extents, got " + shape_str(in));
    }
    return {in[0], in[1] / 2, in[2] / 2};
}

Tensor MaxPoolLayer::forward(const Tensor& x) {
    cached_in_shape_ = x.shape();
    MaxPoolResult r = maxpool2x2(x);
    cached_argmax_ = std::move(r.argmax);
    return std::move(r.output);
}

Tensor MaxPoolLayer::backward(const Tensor& grad_out) {
    return maxpool2x2_backward(cached_argmax_, cached_in_shape_, grad_out);
}

std::vector<std::size_t> FlattenLayer::out_shape(const std::vector<std::size_t>& in) const {
    std::size_t n = 1;
    for (std::size_t e : in) n *= e;
    return {n};
}

Tensor FlattenLayer::forward(const Tensor& x) {
    cached_in_shape_ = x.shape();
    return x.reshaped({x.size()});
}

Tensor FlattenLayer::forward_pure(const Tensor& x) const {
    return x.reshaped({x.size()});
}

Tensor FlattenLayer::backward(const Tensor& grad_out) {
    return grad_out.reshaped(cached_in_shape_);
}

DenseLayer::DenseLayer(std::size_t n_in, std::size_t n_out)
    : weights_({n_out, n_in}),
      bias_({n_out}),
      grad_weights_({n_out, n_in}),
      grad_bias_({n_out}) {}

void DenseLayer::init_glorot(SplitMix64& rng) {
    const double fan_in = static_cast<double>(weights_.extent(1));
    const double fan_out = static_cast<double>(weights_.extent(0));
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] = rng.uniform(-limit, limit);
    for (std::size_t i = 0; i < bias_.size(); ++i) bias_[i] = 0.0;
}

std::vector<std::size_t> DenseLayer::out_shape(const std::vector<std::size_t>& in) const {
    if (in.size() != 1 || in[0] != weights_.extent(1)) {
        throw ShapeError("dense layer expects input [" + std::to_string(weights_.extent(1)) +
                         "], got " + shape_str(in));
    }
    return {weights_.extent(0)};
}

Tensor DenseLayer::forward(const Tensor& x) {
    cached_input_ = x;
    return dense_forward(x, weights_, bias_);
}

Tensor DenseLayer::forward_pure(const Tensor& x) const {
    return dense_forward(x, weights_, bias_);
}

Tensor DenseLayer::backward(const Tensor& grad_out) {
    const std::size_t n_out = weights_.extent(0), n_in = weights_.extent(1);
    double* gw = grad_weights_.data();
    const double* px = cached_input_.data();
    for (std::size_t o = 0; o < n_out; ++o) {
        const double g = grad_out[o];
        grad_bias_[o] += g;
        double* grow = gw + o * n_in;
        for (std::size_t i = 0; i < n_in; ++i) grow[i] += g * px[i];
    }
    Tensor gin({n_in});
    const double* pw = weights_.data();
    for (std::size_t o = 0; o < n_out; ++o) {
        const double g = grad_out[o];
        const double* wrow = pw + o * n_in;
        for (std::size_t i = 0; i < n_in; ++i) gin[i] += g * wrow[i];
    }
    return gin;
}

}  // namespace dvnet
