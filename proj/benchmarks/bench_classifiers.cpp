#include <benchmark/benchmark.h>

#include "dvnet/classifiers.hpp"
#include "dvnet/rng.hpp"

namespace {

using namespace dvnet;

// fused-feature-sized training set: 200 samples, 384 dims, mild separation
LabeledSet bench_set(std::size_t n, std::size_t dim) {
    SplitMix64 rng(123);
    LabeledSet set;
    for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(i % 2);
        std::vector<double> row(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            row[j] = rng.uniform(-1.0, 1.0) + (label ? 0.3 : -0.3) * (j % 7 == 0);
        }
        set.features.push_back(std::move(row));
        set.labels.push_back(label);
    }
    return set;
}

void BM_SvmTrain(benchmark::State& state) {
    const LabeledSet data = bench_set(200, 384);
    for (auto _ : state) {
        benchmark::DoNotOptimize(train_svm(data));
    }
}
BENCHMARK(BM_SvmTrain)->Unit(benchmark::kMillisecond);

void BM_ForestTrain(benchmark::State& state) {
    const LabeledSet data = bench_set(200, 384);
    ForestParams params;
    params.seed = 9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(train_random_forest(data, params));
    }
}
BENCHMARK(BM_ForestTrain)->Unit(benchmark::kMillisecond);

void BM_KnnPredict(benchmark::State& state) {
    const LabeledSet data = bench_set(200, 384);
    const TrainedClassifier clf = train_knn(data, 5);
    const std::vector<double> probe = data.features[7];
    for (auto _ : state) {
        benchmark::DoNotOptimize(clf.predict_score(probe));
    }
}
BENCHMARK(BM_KnnPredict)->Unit(benchmark::kMicrosecond);

void BM_ComputeAuc(benchmark::State& state) {
    SplitMix64 rng(5);
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i = 0; i < 1000; ++i) {
        scores.push_back(rng.next_double());
        labels.push_back(static_cast<int>(rng.below(2)));
    }
    labels[0] = 0;
    labels[1] = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_auc(scores, labels));
    }
}
BENCHMARK(BM_ComputeAuc)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
