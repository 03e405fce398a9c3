#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "dvnet/rng.hpp"
#include "dvnet/tensor.hpp"

namespace dvnet {

enum class ActKind { sigmoid, tanh, relu };

const char* act_name(ActKind kind);

/// Elementwise sigmoid / tanh / max(0,x).
Tensor apply_activation(ActKind kind, const Tensor& x);

/// upstream * f'(x). ReLU's derivative at exactly 0 is defined as 0
/// (subgradient choice); gradient checks must avoid kink-adjacent probes.
Tensor activation_backward(ActKind kind, const Tensor& x, const Tensor& upstream);

/// 2x2 max pooling, stride 2, on [C,H,W] with H and W even. argmax holds the
/// flat input index that won each window, for backward routing.
struct MaxPoolResult {
    Tensor output;
    std::vector<std::size_t> argmax;
};
MaxPoolResult maxpool2x2(const Tensor& x);
Tensor maxpool2x2_backward(const std::vector<std::size_t>& argmax,
                           const std::vector<std::size_t>& input_shape,
                           const Tensor& upstream);

/// W [n_out,n_in] * x [n_in] + b [n_out].
Tensor dense_forward(const Tensor& x, const Tensor& weights, const Tensor& bias);

Tensor softmax(const Tensor& logits);

/// Numerically stable (max-subtracted) softmax cross-entropy against a
/// one-hot target. grad_logits = q - onehot(target).
struct SoftmaxLoss {
    double loss;
    Tensor grad_logits;
    Tensor probs;
};
SoftmaxLoss softmax_cross_entropy(const Tensor& logits, std::size_t target_class);

struct TrainConfig {
    double learning_rate = 0.05;
    std::size_t batch_size = 16;
    std::size_t epochs = 10;
    std::uint64_t seed = 42;
    double l2_weight = 0.0;

    void validate() const;
};

/// p <- p - lr * (g + l2 * p), applied in the given (fixed) order.
void sgd_step(const std::vector<Tensor*>& params, const std::vector<Tensor*>& grads,
              const TrainConfig& config);

/// Trainable network building block. forward() caches activations for the
/// following backward(); forward_pure() is the cache-free inference path and
/// is safe to call concurrently on a frozen layer.
class Layer {
public:
    virtual ~Layer() = default;

    virtual std::vector<std::size_t> out_shape(const std::vector<std::size_t>& in) const = 0;
    virtual Tensor forward(const Tensor& x) = 0;
    virtual Tensor forward_pure(const Tensor& x) const = 0;
    virtual Tensor backward(const Tensor& grad_out) = 0;
    virtual std::vector<Tensor*> params() { return {}; }
    virtual std::vector<Tensor*> grads() { return {}; }
};

class Conv2dLayer final : public Layer {
public:
    Conv2dLayer(std::size_t in_channels, std::size_t out_channels,
                std::size_t kh, std::size_t kw);

    void init_glorot(SplitMix64& rng);

    std::vector<std::size_t> out_shape(const std::vector<std::size_t>& in) const override;
    Tensor forward(const Tensor& x) override;
    Tensor forward_pure(const Tensor& x) const override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<Tensor*> params() override { return {&weights_, &bias_}; }
    std::vector<Tensor*> grads() override { return {&grad_weights_, &grad_bias_}; }

    const Tensor& weights() const { return weights_; }
    const Tensor& bias() const { return bias_; }

private:
    Tensor weights_;  // [O,C,kh,kw]
    Tensor bias_;     // [O]
    Tensor grad_weights_;
    Tensor grad_bias_;
    Tensor cached_input_;
};

class ActivationLayer final : public Layer {
public:
    explicit ActivationLayer(ActKind kind) : kind_(kind) {}

    std::vector<std::size_t> out_shape(const std::vector<std::size_t>& in) const override { return in; }
    Tensor forward(const Tensor& x) override;
    Tensor forward_pure(const Tensor& x) const override { return apply_activation(kind_, x); }
    Tensor backward(const Tensor& grad_out) override;

    ActKind kind() const { return kind_; }

private:
    ActKind kind_;
    Tensor cached_input_;
};

class MaxPoolLayer final : public Layer {
public:
    std::vector<std::size_t> out_shape(const std::vector<std::size_t>& in) const override;
    Tensor forward(const Tensor& x) override;
    Tensor forward_pure(const Tensor& x) const override { return maxpool2x2(x).output; }
    Tensor backward(const Tensor& grad_out) override;

private:
    std::vector<std::size_t> cached_in_shape_;
    std::vector<std::size_t> cached_argmax_;
};

class FlattenLayer final : public Layer {
public:
    std::vector<std::size_t> out_shape(const std::vector<std::size_t>& in) const override;
    Tensor forward(const Tensor& x) override;
    Tensor forward_pure(const Tensor& x) const override;
    Tensor backward(const Tensor& grad_out) override;

private:
    std::vector<std::size_t> cached_in_shape_;
};

class DenseLayer final : public Layer {
public:
    DenseLayer(std::size_t n_in, std::size_t n_out);

    void init_glorot(SplitMix64& rng);

    std::vector<std::size_t> out_shape(const std::vector<std::size_t>& in) const override;
    Tensor forward(const Tensor& x) override;
    Tensor forward_pure(const Tensor& x) const override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<Tensor*> params() override { return {&weights_, &bias_}; }
    std::vector<Tensor*> grads() override { return {&grad_weights_, &grad_bias_}; }

    const Tensor& weights() const { return weights_; }
    std::size_t n_out() const { return weights_.extent(0); }

private:
    Tensor weights_;  // [n_out, n_in]
    Tensor bias_;     // [n_out]
    Tensor grad_weights_;
    Tensor grad_bias_;
    Tensor cached_input_;
};

using LayerPtr = std::unique_ptr<Layer>;

}  // namespace dvnet
