#include <benchmark/benchmark.h>

#include "dvnet/features.hpp"
#include "dvnet/fusion.hpp"
#include "dvnet/synthdata.hpp"

namespace {

using namespace dvnet;

GrayImage bench_image() {
    const LesionParams p =
        sample_lesion_params(LesionClass::malignant, Difficulty::standard, 55);
    return render_lesion(p).coronal;
}

void BM_Hog(benchmark::State& state) {
    const GrayImage img = bench_image();
    for (auto _ : state) {
        benchmark::DoNotOptimize(hog_descriptor(img));
    }
}
BENCHMARK(BM_Hog)->Unit(benchmark::kMicrosecond);

void BM_Glcm(benchmark::State& state) {
    const GrayImage img = bench_image();
    for (auto _ : state) {
        benchmark::DoNotOptimize(glcm_features(img));
    }
}
BENCHMARK(BM_Glcm)->Unit(benchmark::kMicrosecond);

void BM_Hgd(benchmark::State& state) {
    const GrayImage img = bench_image();
    for (auto _ : state) {
        benchmark::DoNotOptimize(hgd_descriptor(img));
    }
}
BENCHMARK(BM_Hgd)->Unit(benchmark::kMicrosecond);

void BM_CnnPenultimate(benchmark::State& state) {
    Network net(cnn1_spec(), 3);
    const GrayImage roi = center_crop(bench_image(), 62, 62);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cnn_penultimate_features(net, roi));
    }
}
BENCHMARK(BM_CnnPenultimate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
