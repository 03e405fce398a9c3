#include <benchmark/benchmark.h>

#include "dvnet/preprocess.hpp"
#include "dvnet/synthdata.hpp"

namespace {

using namespace dvnet;

GrayImage bench_image() {
    const LesionParams p =
        sample_lesion_params(LesionClass::malignant, Difficulty::standard, 99);
    return render_lesion(p).coronal;
}

void BM_MedianFilter(benchmark::State& state) {
    const GrayImage img = bench_image();
    for (auto _ : state) {
        benchmark::DoNotOptimize(median_filter(img, 1));
    }
}
BENCHMARK(BM_MedianFilter)->Unit(benchmark::kMicrosecond);

void BM_Fft2RoundTrip(benchmark::State& state) {
    const GrayImage img = bench_image();
    for (auto _ : state) {
        benchmark::DoNotOptimize(fft2_inverse(fft2_forward(img)));
    }
}
BENCHMARK(BM_Fft2RoundTrip)->Unit(benchmark::kMicrosecond);

void BM_Fft2Bluestein(benchmark::State& state) {
    GrayImage img(63, 63, 0);  // prime-ish extent forces the chirp-z path
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        img.pixels[i] = static_cast<std::uint8_t>(i % 251);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(fft2_forward(img));
    }
}
BENCHMARK(BM_Fft2Bluestein)->Unit(benchmark::kMicrosecond);

void BM_MorphOpenClose(benchmark::State& state) {
    const GrayImage img = bench_image();
    for (auto _ : state) {
        benchmark::DoNotOptimize(morph_open_close(img, 1));
    }
}
BENCHMARK(BM_MorphOpenClose)->Unit(benchmark::kMicrosecond);

void BM_RoiPipeline(benchmark::State& state) {
    const GrayImage img = bench_image();
    for (auto _ : state) {
        benchmark::DoNotOptimize(roi_pipeline(img, {}));
    }
}
BENCHMARK(BM_RoiPipeline)->Unit(benchmark::kMicrosecond);

void BM_RenderLesion(benchmark::State& state) {
    const LesionParams p =
        sample_lesion_params(LesionClass::malignant, Difficulty::standard, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_lesion(p));
    }
}
BENCHMARK(BM_RenderLesion)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
