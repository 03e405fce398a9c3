#include "dvnet/classifiers.hpp"

#include <algorithm>
#include <cmath>

#include "dvnet/error.hpp"
#include "dvnet/rng.hpp"

namespace dvnet {

void LabeledSet::validate() const {
    if (features.empty()) throw DataError("labeled set is empty");
    if (features.size() != labels.size()) {
        throw DataError("labeled set: " + std::to_string(features.size()) + " feature rows vs " +
                        std::to_string(labels.size()) + " labels");
    }
    const std::size_t d = features.front().size();
    for (const auto& row : features) {
        if (row.size() != d) throw DataError("labeled set: ragged feature dimensionality");
        for (double v : row) {
            if (!std::isfinite(v)) throw DataError("labeled set: non-finite feature value");
        }
    }
    for (int label : labels) {
        if (label != 0 && label != 1) throw DataError("labeled set: labels must be 0 or 1");
    }
}

bool LabeledSet::has_both_classes() const {
    bool saw0 = false, saw1 = false;
    for (int label : labels) (label == 1 ? saw1 : saw0) = true;
    return saw0 && saw1;
}

Standardizer Standardizer::fit(const std::vector<std::vector<double>>& features) {
    Standardizer s;
    if (features.empty()) throw DataError("standardizer: empty training features");
    const std::size_t d = features.front().size();
    const double n = static_cast<double>(features.size());
    s.mean.assign(d, 0.0);
    s.inv_std.assign(d, 1.0);
    for (const auto& row : features) {
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += row[j];
    }
    for (double& m : s.mean) m /= n;
    std::vector<double> var(d, 0.0);
    for (const auto& row : features) {
        for (std::size_t j = 0; j < d; ++j) {
            const double c = row[j] - s.mean[j];
            var[j] += c * c;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        const double sd = std::sqrt(var[j] / n);
        s.inv_std[j] = sd > 1e-12 ? 1.0 / sd : 1.0;
    }
    return s;
}

std::vector<double> Standardizer::apply(const std::vector<double>& x) const {
    if (x.size() != mean.size()) {
        throw ShapeError("standardizer: vector length " + std::to_string(x.size()) +
                         " vs fitted dim " + std::to_string(mean.size()));
    }
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) * inv_std[j];
    return out;
}

// ---------------------------------------------------------------------------
// SVM (sequential minimal optimization)

struct TrainedClassifier::SvmModel {
    Standardizer scaler;
    std::vector<std::vector<double>> x;  // standardized training vectors
    std::vector<double> alpha_y;         // alpha_i * y_i
    double b = 0.0;
    SvmKernel kernel = SvmKernel::rbf;
    double gamma = 0.0;

    double kernel_eval(const std::vector<double>& a, const std::vector<double>& c) const {
        if (kernel == SvmKernel::linear) {
            double dot = 0.0;
            for (std::size_t j = 0; j < a.size(); ++j) dot += a[j] * c[j];
            return dot;
        }
        double d2 = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double diff = a[j] - c[j];
            d2 += diff * diff;
        }
        return std::exp(-gamma * d2);
    }

    double decision(const std::vector<double>& raw) const {
        const std::vector<double> xs = scaler.apply(raw);
        double f = b;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (alpha_y[i] != 0.0) f += alpha_y[i] * kernel_eval(x[i], xs);
        }
        return f;
    }
};

TrainedClassifier train_svm(const LabeledSet& data, const SvmParams& params) {
    data.validate();
    if (!data.has_both_classes()) throw DataError("train_svm: both classes required");
    if (params.c <= 0.0) throw ParamError("train_svm: C must be > 0");

    auto model = std::make_shared<TrainedClassifier::SvmModel>();
    model->kernel = params.kernel;
    model->scaler = Standardizer::fit(data.features);
    const std::size_t n = data.size();
    model->x.reserve(n);
    for (const auto& row : data.features) model->x.push_back(model->scaler.apply(row));
    model->gamma = params.gamma > 0.0 ? params.gamma : 1.0 / static_cast<double>(data.dim());

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = data.labels[i] == 1 ? 1.0 : -1.0;

    // precomputed Gram matrix; desk-scale n keeps this small
    std::vector<double> gram(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double k = model->kernel_eval(model->x[i], model->x[j]);
            gram[i * n + j] = k;
            gram[j * n + i] = k;
        }
    }

    std::vector<double> alpha(n, 0.0);
    double b = 0.0;
    const double c_cap = params.c;
    const double tol = params.kkt_tol;

    auto decision_i = [&](std::size_t i) {
        double f = b;
        for (std::size_t j = 0; j < n; ++j) {
            if (alpha[j] != 0.0) f += alpha[j] * y[j] * gram[j * n + i];
        }
        return f;
    };

    bool warned = false;
    std::size_t pass = 0;
    for (; pass < params.max_passes; ++pass) {
        std::size_t changed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ei = decision_i(i) - y[i];
            const bool violates = (y[i] * ei < -tol && alpha[i] < c_cap) ||
                                  (y[i] * ei > tol && alpha[i] > 0.0);
            if (!violates) continue;

            // second index: maximal |E_i - E_j|, ties to the lowest index
            std::size_t j_best = n;
            double best_gap = -1.0, ej_best = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double ej = decision_i(j) - y[j];
                const double gap = std::abs(ei - ej);
                if (gap > best_gap) {
                    best_gap = gap;
                    j_best = j;
                    ej_best = ej;
                }
            }
            if (j_best == n) continue;
            const std::size_t j = j_best;
            const double ej = ej_best;

            double lo, hi;
            if (y[i] != y[j]) {
                lo = std::max(0.0, alpha[j] - alpha[i]);
                hi = std::min(c_cap, c_cap + alpha[j] - alpha[i]);
            } else {
                lo = std::max(0.0, alpha[i] + alpha[j] - c_cap);
                hi = std::min(c_cap, alpha[i] + alpha[j]);
            }
            if (lo >= hi) continue;
            const double eta = 2.0 * gram[i * n + j] - gram[i * n + i] - gram[j * n + j];
            if (eta >= 0.0) continue;
            double aj = alpha[j] - y[j] * (ei - ej) / eta;
            aj = std::clamp(aj, lo, hi);
            if (std::abs(aj - alpha[j]) < 1e-12) continue;
            const double ai = alpha[i] + y[i] * y[j] * (alpha[j] - aj);

            const double b1 = b - ei - y[i] * (ai - alpha[i]) * gram[i * n + i] -
                              y[j] * (aj - alpha[j]) * gram[i * n + j];
            const double b2 = b - ej - y[i] * (ai - alpha[i]) * gram[i * n + j] -
                              y[j] * (aj - alpha[j]) * gram[j * n + j];
            alpha[i] = ai;
            alpha[j] = aj;
            if (ai > 0.0 && ai < c_cap) {
                b = b1;
            } else if (aj > 0.0 && aj < c_cap) {
                b = b2;
            } else {
                b = 0.5 * (b1 + b2);
            }
            ++changed;
        }
        if (changed == 0) break;
    }
    if (pass >= params.max_passes) warned = true;

    model->alpha_y.resize(n);
    for (std::size_t i = 0; i < n; ++i) model->alpha_y[i] = alpha[i] * y[i];
    model->b = b;

    TrainedClassifier clf;
    clf.kind_ = ClassifierKind::svm;
    clf.feature_dim_ = data.dim();
    clf.convergence_warning_ = warned;
    clf.svm_ = std::move(model);
    return clf;
}

// ---------------------------------------------------------------------------
// Random forest

namespace {

struct TreeNode {
    int feature = -1;       // -1 = leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double leaf_value = 0.0;  // fraction of class 1
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict(const std::vector<double>& x) const {
        std::int32_t idx = 0;
        while (nodes[static_cast<std::size_t>(idx)].feature >= 0) {
            const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
            idx = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                              : node.right;
        }
        return nodes[static_cast<std::size_t>(idx)].leaf_value;
    }
};

struct TreeBuilder {
    const std::vector<std::vector<double>>& x;
    const std::vector<int>& y;
    std::size_t max_depth;
    std::size_t n_candidates;
    SplitMix64& rng;
    Tree tree;

    std::int32_t build(std::vector<std::size_t>& indices, std::size_t depth) {
        std::size_t ones = 0;
        for (std::size_t i : indices) ones += static_cast<std::size_t>(y[i]);
        const double frac = static_cast<double>(ones) / static_cast<double>(indices.size());
        const bool pure = ones == 0 || ones == indices.size();
        if (pure || depth >= max_depth || indices.size() < 2) {
            TreeNode leaf;
            leaf.leaf_value = frac;
            tree.nodes.push_back(leaf);
            return static_cast<std::int32_t>(tree.nodes.size() - 1);
        }

        // sqrt(d) candidate features, sampled without replacement
        const std::size_t d = x.front().size();
        std::vector<std::size_t> feats(d);
        for (std::size_t j = 0; j < d; ++j) feats[j] = j;
        for (std::size_t j = 0; j < n_candidates; ++j) {
            const std::size_t pick = j + static_cast<std::size_t>(rng.below(d - j));
            std::swap(feats[j], feats[pick]);
        }

        int best_feature = -1;
        double best_threshold = 0.0, best_gini = 1e18;
        std::vector<std::pair<double, int>> column(indices.size());
        for (std::size_t cand = 0; cand < n_candidates; ++cand) {
            const std::size_t f = feats[cand];
            for (std::size_t i = 0; i < indices.size(); ++i) {
                column[i] = {x[indices[i]][f], y[indices[i]]};
            }
            std::sort(column.begin(), column.end());
            std::size_t left_n = 0, left_ones = 0;
            const std::size_t total_n = column.size();
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                ++left_n;
                left_ones += static_cast<std::size_t>(column[i].second);
                if (column[i].first == column[i + 1].first) continue;
                const std::size_t right_n = total_n - left_n;
                const std::size_t right_ones = ones - left_ones;
                const double pl = static_cast<double>(left_ones) / static_cast<double>(left_n);
                const double pr = static_cast<double>(right_ones) / static_cast<double>(right_n);
                const double gini = static_cast<double>(left_n) * 2.0 * pl * (1.0 - pl) +
                                    static_cast<double>(right_n) * 2.0 * pr * (1.0 - pr);
                if (gini < best_gini) {
                    best_gini = gini;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (column[i].first + column[i + 1].first);
                }
            }
        }
        if (best_feature < 0) {  // all candidate columns constant
            TreeNode leaf;
            leaf.leaf_value = frac;
            tree.nodes.push_back(leaf);
            return static_cast<std::int32_t>(tree.nodes.size() - 1);
        }

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : indices) {
            (x[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left_idx : right_idx)
                .push_back(i);
        }
        tree.nodes.emplace_back();
        const std::int32_t node_idx = static_cast<std::int32_t>(tree.nodes.size() - 1);
        const std::int32_t left = build(left_idx, depth + 1);
        const std::int32_t right = build(right_idx, depth + 1);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(node_idx)];
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.left = left;
        node.right = right;
        return node_idx;
    }
};

}  // namespace

struct TrainedClassifier::ForestModel {
    std::vector<Tree> trees;
};

TrainedClassifier train_random_forest(const LabeledSet& data, const ForestParams& params) {
    data.validate();
    if (params.n_trees < 1) throw ParamError("train_random_forest: n_trees must be >= 1");

    auto model = std::make_shared<TrainedClassifier::ForestModel>();
    model->trees.resize(params.n_trees);
    const std::size_t n = data.size();
    const std::size_t d = data.dim();
    const std::size_t n_candidates =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
    for (std::size_t t = 0; t < params.n_trees; ++t) {
        SplitMix64 rng(derive_seed(params.seed, t));
        std::vector<std::size_t> indices(n);
        for (std::size_t i = 0; i < n; ++i) indices[i] = static_cast<std::size_t>(rng.below(n));
        TreeBuilder builder{data.features, data.labels, params.max_depth, n_candidates, rng, {}};
        builder.build(indices, 0);
        model->trees[t] = std::move(builder.tree);
    }

    TrainedClassifier clf;
    clf.kind_ = ClassifierKind::random_forest;
    clf.feature_dim_ = d;
    clf.forest_ = std::move(model);
    return clf;
}

// ---------------------------------------------------------------------------
// k nearest neighbors

struct TrainedClassifier::KnnModel {
    Standardizer scaler;
    std::vector<std::vector<double>> x;  // standardized
    std::vector<int> y;
    std::size_t k = 5;
};

TrainedClassifier train_knn(const LabeledSet& data, std::size_t k) {
    data.validate();
    if (k % 2 == 0) throw ParamError("train_knn: k must be odd");
    if (k > data.size()) throw ParamError("train_knn: k exceeds training size");

    auto model = std::make_shared<TrainedClassifier::KnnModel>();
    model->scaler = Standardizer::fit(data.features);
    for (const auto& row : data.features) model->x.push_back(model->scaler.apply(row));
    model->y = data.labels;
    model->k = k;

    TrainedClassifier clf;
    clf.kind_ = ClassifierKind::knn;
    clf.feature_dim_ = data.dim();
    clf.knn_ = std::move(model);
    return clf;
}

double TrainedClassifier::predict_score(const std::vector<double>& x) const {
    if (x.size() != feature_dim_) {
        throw ShapeError("predict_score: vector length " + std::to_string(x.size()) +
                         " vs model dim " + std::to_string(feature_dim_));
    }
    switch (kind_) {
        case ClassifierKind::svm:
            return 1.0 / (1.0 + std::exp(-svm_->decision(x)));
        case ClassifierKind::random_forest: {
            std::size_t votes = 0;
            for (const Tree& tree : forest_->trees) {
                if (tree.predict(x) > 0.5) ++votes;
            }
            return static_cast<double>(votes) / static_cast<double>(forest_->trees.size());
        }
        case ClassifierKind::knn: {
            const std::vector<double> xs = knn_->scaler.apply(x);
            std::vector<std::pair<double, std::size_t>> dist(knn_->x.size());
            for (std::size_t i = 0; i < knn_->x.size(); ++i) {
                double d2 = 0.0;
                for (std::size_t j = 0; j < xs.size(); ++j) {
                    const double diff = knn_->x[i][j] - xs[j];
                    d2 += diff * diff;
                }
                dist[i] = {d2, i};  // index in the pair breaks distance ties
            }
            std::sort(dist.begin(), dist.end());
            std::size_t ones = 0;
            for (std::size_t i = 0; i < knn_->k; ++i) {
                ones += static_cast<std::size_t>(knn_->y[dist[i].second]);
            }
            return static_cast<double>(ones) / static_cast<double>(knn_->k);
        }
    }
    throw Error("predict_score: unknown classifier kind");
}

// ---------------------------------------------------------------------------
// Metrics

double compute_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw DataError("compute_auc: size mismatch");
    if (scores.empty()) throw DataError("compute_auc: empty input");
    for (double s : scores) {
        if (!std::isfinite(s)) throw DataError("compute_auc: non-finite score");
    }
    std::uint64_t n_pos = 0, n_neg = 0;
    for (int label : labels) (label == 1 ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0) {
        throw DataError("compute_auc: AUC undefined when only one class is present");
    }

    std::vector<std::pair<double, int>> order(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) order[i] = {scores[i], labels[i]};
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // exact integer pair counting over tie groups
    std::uint64_t wins2 = 0;  // 2*wins + ties
    std::uint64_t neg_below = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::uint64_t pos_in = 0, neg_in = 0;
        while (j < order.size() && order[j].first == order[i].first) {
            (order[j].second == 1 ? pos_in : neg_in) += 1;
            ++j;
        }
        wins2 += 2 * pos_in * neg_below + pos_in * neg_in;
        neg_below += neg_in;
        i = j;
    }
    return static_cast<double>(wins2) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

EvalReport evaluate(const TrainedClassifier& clf, const LabeledSet& test, double threshold) {
    test.validate();
    if (test.dim() != clf.feature_dim()) {
        throw ShapeError("evaluate: test dim " + std::to_string(test.dim()) + " vs model dim " +
                         std::to_string(clf.feature_dim()));
    }
    EvalReport report;
    report.seed = test.seed;
    report.convergence_warning = clf.convergence_warning();
    std::vector<double> scores(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) scores[i] = clf.predict_score(test.features[i]);
    report.auc = compute_auc(scores, test.labels);
    for (std::size_t i = 0; i < test.size(); ++i) {
        const int pred = scores[i] > threshold ? 1 : 0;
        if (test.labels[i] == 1) {
            (pred == 1 ? report.tp : report.fn) += 1;
        } else {
            (pred == 1 ? report.fp : report.tn) += 1;
        }
    }
    report.accuracy =
        static_cast<double>(report.tp + report.tn) / static_cast<double>(test.size());
    return report;
}

}  // namespace dvnet
