#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace dvnet {

struct LabeledSet {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;  // 0 benign, 1 malignant
    std::uint64_t seed = 0;
    std::string split_id;

    std::size_t size() const { return features.size(); }
    std::size_t dim() const { return features.empty() ? 0 : features.front().size(); }

    /// Uniform dimensionality, matching label count, finite values.
    void validate() const;
    bool has_both_classes() const;
};

/// Per-dimension zero-mean unit-variance transform, statistics from the
/// training split only. Constant dimensions pass through unscaled.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> inv_std;

    static Standardizer fit(const std::vector<std::vector<double>>& features);
    std::vector<double> apply(const std::vector<double>& x) const;
};

enum class ClassifierKind { svm, random_forest, knn };

enum class SvmKernel { linear, rbf };

struct SvmParams {
    SvmKernel kernel = SvmKernel::rbf;
    double c = 1.0;
    double gamma = 0.0;  // 0 = auto (1 / feature_dim)
    double kkt_tol = 1e-3;
    std::size_t max_passes = 100000;
};

struct ForestParams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 8;
    std::uint64_t seed = 0;
};

/// A trained SVM / random forest / kNN model. predict_score returns a
/// probability-like score in favor of class 1; prediction is pure and safe
/// to call concurrently.
class TrainedClassifier {
public:
    ClassifierKind kind() const { return kind_; }
    std::size_t feature_dim() const { return feature_dim_; }
    /// True when SMO hit its pass cap before reaching KKT tolerance.
    bool convergence_warning() const { return convergence_warning_; }

    double predict_score(const std::vector<double>& x) const;

private:
    friend TrainedClassifier train_svm(const LabeledSet&, const SvmParams&);
    friend TrainedClassifier train_random_forest(const LabeledSet&, const ForestParams&);
    friend TrainedClassifier train_knn(const LabeledSet&, std::size_t k);

    struct SvmModel;
    struct ForestModel;
    struct KnnModel;

    ClassifierKind kind_ = ClassifierKind::svm;
    std::size_t feature_dim_ = 0;
    bool convergence_warning_ = false;
    std::shared_ptr<const SvmModel> svm_;
    std::shared_ptr<const ForestModel> forest_;
    std::shared_ptr<const KnnModel> knn_;
};

/// Soft-margin SMO to KKT tolerance (default 1e-3); decision value mapped to
/// a score by the logistic. Features are standardized internally.
TrainedClassifier train_svm(const LabeledSet& data, const SvmParams& params = {});

/// Bootstrap CART trees, Gini splits over sqrt(d) candidate features, score
/// = fraction of trees voting class 1. Tree t draws from seed ^ t, so the
/// forest is identical no matter how trees are scheduled. Raw features.
TrainedClassifier train_random_forest(const LabeledSet& data, const ForestParams& params = {});

/// k odd and <= n. Distance ties break toward the lower sample index.
/// Features are standardized internally.
TrainedClassifier train_knn(const LabeledSet& data, std::size_t k = 5);

/// Rank-sum AUC with half credit for ties; exact pair counting in integers.
double compute_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct EvalReport {
    double auc = 0.0;
    double accuracy = 0.0;
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
    bool convergence_warning = false;
};

/// AUC from raw scores; accuracy and confusion counts from scores
/// thresholded at `threshold` (score > threshold -> class 1).
EvalReport evaluate(const TrainedClassifier& clf, const LabeledSet& test, double threshold = 0.5);

}  // namespace dvnet
