#include "dvnet/network.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "dvnet/error.hpp"

namespace dvnet {

namespace {

ActKind act_from_name(const std::string& name, std::size_t offset) {
    if (name == "sigmoid") return ActKind::sigmoid;
    if (name == "tanh") return ActKind::tanh;
    if (name == "relu") return ActKind::relu;
    throw ParseError("unknown activation '" + name + "'", offset);
}

}  // namespace

std::string LayerSpecEntry::to_line() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::conv:
            os << "conv " << channels << ' ' << kh << ' ' << kw;
            break;
        case Kind::activation:
            os << act_name(act);
            break;
        case Kind::maxpool:
            os << "maxpool";
            break;
        case Kind::dense:
            os << "dense " << units;
            break;
    }
    return os.str();
}

void ArchitectureSpec::validate() const {
    if (n_branches != 1 && n_branches != 2) {
        throw ShapeError("architecture '" + id + "': branches must be 1 or 2");
    }
    std::vector<std::size_t> shape{input[0], input[1], input[2]};
    std::size_t index = 0;
    for (const auto& e : branch) {
        try {
            switch (e.kind) {
                case LayerSpecEntry::Kind::conv:
                    shape = Conv2dLayer(shape.at(0), e.channels, e.kh, e.kw).out_shape(shape);
                    break;
                case LayerSpecEntry::Kind::activation:
                    break;
                case LayerSpecEntry::Kind::maxpool:
                    shape = MaxPoolLayer().out_shape(shape);
                    break;
                case LayerSpecEntry::Kind::dense:
                    throw ShapeError("dense layer not allowed before flatten");
            }
        } catch (const ShapeError& e2) {
            throw ShapeError("architecture '" + id + "' invalid at branch layer " +
                             std::to_string(index) + ": " + e2.what());
        }
        ++index;
    }
    std::size_t width = 1;
    for (std::size_t e : shape) width *= e;
    width *= n_branches;
    index = 0;
    bool saw_dense = false;
    for (const auto& e : trunk) {
        switch (e.kind) {
            case LayerSpecEntry::Kind::dense:
                width = e.units;
                saw_dense = true;
                break;
            case LayerSpecEntry::Kind::activation:
                break;
            default:
                throw ShapeError("architecture '" + id + "' invalid at trunk layer " +
                                 std::to_string(index) + ": only dense/activation allowed");
        }
        ++index;
    }
    if (!saw_dense || trunk.back().kind != LayerSpecEntry::Kind::dense) {
        throw ShapeError("architecture '" + id + "': trunk must end with a dense logit layer");
    }
}

std::size_t ArchitectureSpec::branch_flat_width() const {
    std::vector<std::size_t> shape{input[0], input[1], input[2]};
    for (const auto& e : branch) {
        switch (e.kind) {
            case LayerSpecEntry::Kind::conv:
                shape = Conv2dLayer(shape.at(0), e.channels, e.kh, e.kw).out_shape(shape);
                break;
            case LayerSpecEntry::Kind::maxpool:
                shape = MaxPoolLayer().out_shape(shape);
                break;
            default:
                break;
        }
    }
    std::size_t width = 1;
    for (std::size_t e : shape) width *= e;
    return width;
}

std::size_t ArchitectureSpec::penultimate_width() const {
    std::size_t width = branch_flat_width() * n_branches;
    for (std::size_t i = 0; i + 1 < trunk.size(); ++i) {
        if (trunk[i].kind == LayerSpecEntry::Kind::dense) width = trunk[i].units;
    }
    return width;
}

std::size_t ArchitectureSpec::output_classes() const { return trunk.back().units; }

std::string ArchitectureSpec::to_text() const {
    std::ostringstream os;
    os << "id " << id << '\n';
    os << "branches " << n_branches << '\n';
    os << "input " << input[0] << ' ' << input[1] << ' ' << input[2] << '\n';
    for (const auto& e : branch) os << e.to_line() << '\n';
    os << "flatten\n";
    if (n_branches > 1) os << "concat\n";
    for (const auto& e : trunk) os << e.to_line() << '\n';
    os << "end\n";
    return os.str();
}

ArchitectureSpec ArchitectureSpec::from_text(const std::string& text) {
    ArchitectureSpec spec;
    spec.input = {0, 0, 0};
    std::istringstream is(text);
    std::string line;
    std::size_t offset = 0;
    bool in_trunk = false;
    bool saw_end = false;
    bool saw_id = false, saw_branches = false, saw_input = false;
    while (std::getline(is, line)) {
        const std::size_t line_offset = offset;
        offset += line.size() + 1;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "id") {
            ls >> spec.id;
            saw_id = true;
        } else if (word == "branches") {
            if (!(ls >> spec.n_branches)) throw ParseError("bad branches line", line_offset);
            saw_branches = true;
        } else if (word == "input") {
            if (!(ls >> spec.input[0] >> spec.input[1] >> spec.input[2])) {
                throw ParseError("bad input line", line_offset);
            }
            saw_input = true;
        } else if (word == "conv") {
            LayerSpecEntry e{LayerSpecEntry::Kind::conv};
            if (!(ls >> e.channels >> e.kh >> e.kw)) throw ParseError("bad conv line", line_offset);
            spec.branch.push_back(e);
        } else if (word == "maxpool") {
            spec.branch.push_back(LayerSpecEntry::maxpool());
        } else if (word == "flatten") {
            in_trunk = true;
        } else if (word == "concat") {
            // structural marker only; branch count already declared
        } else if (word == "dense") {
            LayerSpecEntry e{LayerSpecEntry::Kind::dense};
            if (!(ls >> e.units)) throw ParseError("bad dense line", line_offset);
            spec.trunk.push_back(e);
        } else if (word == "sigmoid" || word == "tanh" || word == "relu") {
            auto e = LayerSpecEntry::activation(act_from_name(word, line_offset));
            (in_trunk ? spec.trunk : spec.branch).push_back(e);
        } else if (word == "end") {
            saw_end = true;
            break;
        } else {
            throw ParseError("unknown architecture line '" + line + "'", line_offset);
        }
    }
    if (!saw_end) throw ParseError("architecture text missing 'end'", offset);
    if (!saw_id || !saw_branches || !saw_input) {
        throw ParseError("architecture text missing id/branches/input", 0);
    }
    return spec;
}

Network::Network(ArchitectureSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), seed_(seed) {
    spec_.validate();
    build();
    SplitMix64 rng(seed_);
    for (auto& branch : branches_) {
        for (auto& layer : branch) {
            if (auto* conv = dynamic_cast<Conv2dLayer*>(layer.get())) conv->init_glorot(rng);
        }
    }
    for (auto& layer : trunk_) {
        if (auto* dense = dynamic_cast<DenseLayer*>(layer.get())) dense->init_glorot(rng);
    }
}

void Network::build() {
    branches_.clear();
    trunk_.clear();
    for (std::size_t b = 0; b < spec_.n_branches; ++b) {
        std::vector<LayerPtr> layers;
        std::vector<std::size_t> shape{spec_.input[0], spec_.input[1], spec_.input[2]};
        for (const auto& e : spec_.branch) {
            switch (e.kind) {
                case LayerSpecEntry::Kind::conv:
                    layers.push_back(std::make_unique<Conv2dLayer>(shape[0], e.channels, e.kh, e.kw));
                    break;
                case LayerSpecEntry::Kind::activation:
                    layers.push_back(std::make_unique<ActivationLayer>(e.act));
                    break;
                case LayerSpecEntry::Kind::maxpool:
                    layers.push_back(std::make_unique<MaxPoolLayer>());
                    break;
                case LayerSpecEntry::Kind::dense:
                    throw ShapeError("dense layer not allowed in branch section");
            }
            shape = layers.back()->out_shape(shape);
        }
        layers.push_back(std::make_unique<FlattenLayer>());
        branches_.push_back(std::move(layers));
    }
    std::size_t width = spec_.branch_flat_width() * spec_.n_branches;
    for (const auto& e : spec_.trunk) {
        switch (e.kind) {
            case LayerSpecEntry::Kind::dense:
                trunk_.push_back(std::make_unique<DenseLayer>(width, e.units));
                width = e.units;
                break;
            case LayerSpecEntry::Kind::activation:
                trunk_.push_back(std::make_unique<ActivationLayer>(e.act));
                break;
            default:
                throw ShapeError("only dense/activation allowed in trunk section");
        }
    }
}

Tensor Network::forward(const std::vector<Tensor>& inputs) {
    if (inputs.size() != spec_.n_branches) {
        throw ShapeError("network '" + spec_.id + "' expects " + std::to_string(spec_.n_branches) +
                         " inputs, got " + std::to_string(inputs.size()));
    }
    std::vector<double> concat;
    branch_widths_.assign(spec_.n_branches, {});
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        Tensor t = inputs[b];
        for (auto& layer : branches_[b]) t = layer->forward(t);
        branch_widths_[b] = t.shape();
        concat.insert(concat.end(), t.values().begin(), t.values().end());
    }
    const std::size_t width = concat.size();
    Tensor t({width}, std::move(concat));
    for (auto& layer : trunk_) t = layer->forward(t);
    return t;
}

void Network::backward(const Tensor& grad_logits) {
    Tensor g = grad_logits;
    for (auto it = trunk_.rbegin(); it != trunk_.rend(); ++it) g = (*it)->backward(g);
    std::size_t off = 0;
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        const std::size_t width = branch_widths_.at(b).at(0);
        Tensor gb({width},
                  std::vector<double>(g.values().begin() + off, g.values().begin() + off + width));
        off += width;
        for (auto it = branches_[b].rbegin(); it != branches_[b].rend(); ++it) {
            gb = (*it)->backward(gb);
        }
    }
}

void Network::zero_grads() {
    for (Tensor* g : gradients()) {
        std::fill(g->values().begin(), g->values().end(), 0.0);
    }
}

std::vector<Tensor*> Network::parameters() {
    std::vector<Tensor*> out;
    for (auto& branch : branches_) {
        for (auto& layer : branch) {
            for (Tensor* p : layer->params()) out.push_back(p);
        }
    }
    for (auto& layer : trunk_) {
        for (Tensor* p : layer->params()) out.push_back(p);
    }
    return out;
}

std::vector<const Tensor*> Network::parameters() const {
    std::vector<const Tensor*> out;
    for (const Tensor* p : const_cast<Network*>(this)->parameters()) out.push_back(p);
    return out;
}

std::vector<Tensor*> Network::gradients() {
    std::vector<Tensor*> out;
    for (auto& branch : branches_) {
        for (auto& layer : branch) {
            for (Tensor* g : layer->grads()) out.push_back(g);
        }
    }
    for (auto& layer : trunk_) {
        for (Tensor* g : layer->grads()) out.push_back(g);
    }
    return out;
}

Tensor Network::run_trunk_pure(Tensor flat, bool stop_before_final) const {
    const std::size_t last = trunk_.size() - 1;
    for (std::size_t i = 0; i < trunk_.size(); ++i) {
        if (stop_before_final && i == last) break;
        flat = trunk_[i]->forward_pure(flat);
    }
    return flat;
}

Tensor Network::infer_logits(const std::vector<Tensor>& inputs) const {
    if (inputs.size() != spec_.n_branches) {
        throw ShapeError("network '" + spec_.id + "' expects " + std::to_string(spec_.n_branches) +
                         " inputs, got " + std::to_string(inputs.size()));
    }
    std::vector<double> concat;
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        Tensor t = inputs[b];
        for (const auto& layer : branches_[b]) t = layer->forward_pure(t);
        concat.insert(concat.end(), t.values().begin(), t.values().end());
    }
    const std::size_t width = concat.size();
    return run_trunk_pure(Tensor({width}, std::move(concat)), false);
}

Tensor Network::infer_penultimate(const std::vector<Tensor>& inputs) const {
    if (inputs.size() != spec_.n_branches) {
        throw ShapeError("network '" + spec_.id + "' expects " + std::to_string(spec_.n_branches) +
                         " inputs, got " + std::to_string(inputs.size()));
    }
    std::vector<double> concat;
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        Tensor t = inputs[b];
        for (const auto& layer : branches_[b]) t = layer->forward_pure(t);
        concat.insert(concat.end(), t.values().begin(), t.values().end());
    }
    const std::size_t width = concat.size();
    return run_trunk_pure(Tensor({width}, std::move(concat)), true);
}

double Network::predict_prob(const std::vector<Tensor>& inputs) const {
    return softmax(infer_logits(inputs))[1];
}

std::string serialize_network(const Network& net) {
    std::ostringstream os;
    os << "DVNET1\n";
    os << "seed " << net.seed() << '\n';
    os << net.arch().to_text();
    std::uint64_t count = 0;
    for (const Tensor* p : net.parameters()) count += p->size();
    os << "params " << count << '\n';
    for (const Tensor* p : net.parameters()) {
        os.write(reinterpret_cast<const char*>(p->data()),
                 static_cast<std::streamsize>(p->size() * sizeof(double)));
    }
    os.write(reinterpret_cast<const char*>(&count), sizeof(count));
    return os.str();
}

Network deserialize_network(const std::string& bytes) {
    std::size_t pos = 0;
    auto read_line = [&]() {
        const std::size_t nl = bytes.find('\n', pos);
        if (nl == std::string::npos) throw ParseError("unterminated header line", pos);
        std::string line = bytes.substr(pos, nl - pos);
        pos = nl + 1;
        return line;
    };
    auto parse_u64 = [](const std::string& text, std::size_t offset) -> std::uint64_t {
        try {
            std::size_t used = 0;
            const std::uint64_t value = std::stoull(text, &used);
            if (used != text.size()) throw ParseError("trailing junk after integer", offset);
            return value;
        } catch (const std::logic_error&) {
            throw ParseError("malformed integer '" + text + "'", offset);
        }
    };

    if (read_line() != "DVNET1") throw ParseError("bad magic, expected DVNET1", 0);
    const std::string seed_line = read_line();
    if (seed_line.rfind("seed ", 0) != 0) throw ParseError("missing seed line", pos);
    const std::uint64_t seed = parse_u64(seed_line.substr(5), pos);

    const std::size_t arch_start = pos;
    std::string line;
    while (true) {
        line = read_line();
        if (line == "end") break;
    }
    ArchitectureSpec spec = ArchitectureSpec::from_text(bytes.substr(arch_start, pos - arch_start));

    line = read_line();
    if (line.rfind("params ", 0) != 0) throw ParseError("missing params line", pos);
    const std::uint64_t count = parse_u64(line.substr(7), pos);

    Network net(spec, seed);
    std::uint64_t expected = 0;
    for (const Tensor* p : net.parameters()) expected += p->size();
    if (expected != count) {
        throw IntegrityError("checkpoint param count " + std::to_string(count) +
                             " does not match architecture (" + std::to_string(expected) + ")");
    }
    const std::size_t payload = count * sizeof(double);
    if (bytes.size() < pos + payload + sizeof(std::uint64_t)) {
        throw ParseError("truncated checkpoint", bytes.size());
    }
    for (Tensor* p : net.parameters()) {
        std::memcpy(p->data(), bytes.data() + pos, p->size() * sizeof(double));
        pos += p->size() * sizeof(double);
    }
    std::uint64_t footer = 0;
    std::memcpy(&footer, bytes.data() + pos, sizeof(footer));
    pos += sizeof(footer);
    if (footer != count) throw ParseError("checkpoint footer mismatch", pos - sizeof(footer));
    return net;
}

void save_network(const Network& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    const std::string bytes = serialize_network(net);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

Network load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_network(buf.str());
}

void train_network(Network& net, const std::vector<TrainSample>& data, const TrainConfig& config) {
    config.validate();
    if (data.empty()) throw DataError("train_network: empty training set");
    std::vector<Tensor*> params = net.parameters();
    std::vector<Tensor*> grads = net.gradients();
    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        SplitMix64 rng(derive_seed(config.seed, 0x9D5F3C6A74B21E0FULL + epoch));
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            net.zero_grads();
            for (std::size_t i = start; i < end; ++i) {
                const TrainSample& sample = data[order[i]];
                Tensor logits = net.forward(sample.inputs);
                SoftmaxLoss loss = softmax_cross_entropy(logits, static_cast<std::size_t>(sample.label));
                net.backward(loss.grad_logits);
            }
            const double inv = 1.0 / static_cast<double>(end - start);
            for (Tensor* g : grads) {
                for (double& v : g->values()) v *= inv;
            }
            sgd_step(params, grads, config);
        }
    }
}

double training_accuracy(const Network& net, const std::vector<TrainSample>& data) {
    if (data.empty()) throw DataError("training_accuracy: empty set");
    std::size_t correct = 0;
    for (const TrainSample& sample : data) {
        const double p = net.predict_prob(sample.inputs);
        const int pred = p > 0.5 ? 1 : 0;
        if (pred == sample.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace dvnet
