#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dvnet/layers.hpp"

namespace dvnet {

/// One entry of the textual architecture description. The branch section
/// holds conv/activation/maxpool entries on [C,H,W]; the trunk section holds
/// dense/activation entries on flat vectors. Flatten (and the concat point
/// for dual-branch nets) sit between the two sections.
struct LayerSpecEntry {
    enum class Kind { conv, activation, maxpool, dense };

    Kind kind;
    std::size_t channels = 0;  // conv
    std::size_t kh = 0, kw = 0;
    std::size_t units = 0;  // dense
    ActKind act = ActKind::relu;

    static LayerSpecEntry conv(std::size_t channels, std::size_t kh, std::size_t kw) {
        LayerSpecEntry e{Kind::conv};
        e.channels = channels;
        e.kh = kh;
        e.kw = kw;
        return e;
    }
    static LayerSpecEntry activation(ActKind kind) {
        LayerSpecEntry e{Kind::activation};
        e.act = kind;
        return e;
    }
    static LayerSpecEntry maxpool() { return LayerSpecEntry{Kind::maxpool}; }
    static LayerSpecEntry dense(std::size_t units) {
        LayerSpecEntry e{Kind::dense};
        e.units = units;
        return e;
    }

    std::string to_line() const;
};

struct ArchitectureSpec {
    std::string id;                         // SingleNet, TwoViewsNet, CNN1, CNN2
    std::size_t n_branches = 1;             // identical branches, independent weights
    std::array<std::size_t, 3> input{1, 62, 62};  // per-branch [C,H,W]
    std::vector<LayerSpecEntry> branch;     // conv stack, before flatten
    std::vector<LayerSpecEntry> trunk;      // after flatten (+concat), ends with the logit dense

    /// Shape-checks every adjacent pair; throws ShapeError naming the layer
    /// index of the first offending pair.
    void validate() const;

    /// Flat width of one branch after its conv stack.
    std::size_t branch_flat_width() const;

    /// Width of the trunk activation feeding the final dense layer.
    std::size_t penultimate_width() const;

    std::size_t output_classes() const;

    std::string to_text() const;
    static ArchitectureSpec from_text(const std::string& text);
};

/// An initialized layer graph: n identical-shape branches with independent
/// weights, concatenated, followed by a dense trunk. Construction validates
/// the architecture and draws Glorot-uniform weights (zero biases) from a
/// SplitMix64 stream seeded with `seed`, so equal (spec, seed) pairs give
/// bit-identical parameters.
class Network {
public:
    Network(ArchitectureSpec spec, std::uint64_t seed);

    const ArchitectureSpec& arch() const { return spec_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t n_inputs() const { return spec_.n_branches; }

    /// Training path: caches activations, enabling backward().
    Tensor forward(const std::vector<Tensor>& inputs);
    void backward(const Tensor& grad_logits);
    void zero_grads();

    /// Fixed order: branch 0 layers, branch 1 layers, trunk layers; weights
    /// before bias within a layer. Serialization uses the same order.
    std::vector<Tensor*> parameters();
    std::vector<Tensor*> gradients();
    std::vector<const Tensor*> parameters() const;

    /// Pure inference paths; safe to call concurrently on a frozen network.
    Tensor infer_logits(const std::vector<Tensor>& inputs) const;
    /// Activation entering the final dense layer.
    Tensor infer_penultimate(const std::vector<Tensor>& inputs) const;
    /// softmax(logits)[1], the malignancy probability.
    double predict_prob(const std::vector<Tensor>& inputs) const;

private:
    void build();
    Tensor run_trunk_pure(Tensor flat, bool stop_before_final) const;

    ArchitectureSpec spec_;
    std::uint64_t seed_;
    std::vector<std::vector<LayerPtr>> branches_;
    std::vector<LayerPtr> trunk_;
    std::vector<std::vector<std::size_t>> branch_widths_;  // flat widths, cached
};

/// Checkpoint format (little-endian doubles):
///   line "DVNET1", the architecture text (ends with "end"), a "params N"
///   line, N raw 64-bit IEEE-754 values in parameter order, then N again as
///   a u64 footer for truncation detection.
std::string serialize_network(const Network& net);
Network deserialize_network(const std::string& bytes);
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

struct TrainSample {
    std::vector<Tensor> inputs;  // one tensor per branch
    int label = 0;               // 0 benign, 1 malignant
};

/// Epochs of deterministic mini-batch SGD on softmax cross-entropy. Batch
/// gradient is the mean over the batch; sample order reshuffles each epoch
/// from the config seed. Single-threaded: one network's caches are not
/// shareable.
void train_network(Network& net, const std::vector<TrainSample>& data, const TrainConfig& config);

double training_accuracy(const Network& net, const std::vector<TrainSample>& data);

}  // namespace dvnet
