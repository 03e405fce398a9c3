#include <benchmark/benchmark.h>

#include "dvnet/fusion.hpp"
#include "dvnet/rng.hpp"
#include "dvnet/tensor.hpp"

namespace {

using namespace dvnet;

Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-1.0, 1.0);
    return t;
}

// stage-2 conv of the reference stack: the training hot spot
void BM_Conv2dStage2(benchmark::State& state) {
    const Tensor input = random_tensor({16, 30, 30}, 1);
    const Tensor kernels = random_tensor({32, 16, 3, 3}, 2);
    const Tensor bias = random_tensor({32}, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(conv2d_valid(input, kernels, bias));
    }
}
BENCHMARK(BM_Conv2dStage2)->Unit(benchmark::kMicrosecond);

void BM_Conv2dBackward(benchmark::State& state) {
    const Tensor input = random_tensor({16, 30, 30}, 1);
    const Tensor kernels = random_tensor({32, 16, 3, 3}, 2);
    const Tensor grad_out = random_tensor({32, 28, 28}, 4);
    for (auto _ : state) {
        Tensor gw({32, 16, 3, 3});
        Tensor gb({32});
        conv2d_grad_params(grad_out, input, gw, gb);
        benchmark::DoNotOptimize(conv2d_grad_input(grad_out, kernels, 30, 30));
        benchmark::DoNotOptimize(gw);
    }
}
BENCHMARK(BM_Conv2dBackward)->Unit(benchmark::kMicrosecond);

void BM_Matmul(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const Tensor a = random_tensor({n, n}, 5);
    const Tensor b = random_tensor({n, n}, 6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(matmul(a, b));
    }
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_SingleNetForward(benchmark::State& state) {
    Network net = build_single_net(7);
    const Tensor x = random_tensor({1, 62, 62}, 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(net.infer_logits({x}));
    }
}
BENCHMARK(BM_SingleNetForward)->Unit(benchmark::kMillisecond);

void BM_SingleNetTrainStep(benchmark::State& state) {
    Network net = build_single_net(7);
    const Tensor x = random_tensor({1, 62, 62}, 8);
    for (auto _ : state) {
        net.zero_grads();
        const Tensor logits = net.forward({x});
        const SoftmaxLoss loss = softmax_cross_entropy(logits, 1);
        net.backward(loss.grad_logits);
        benchmark::DoNotOptimize(net.gradients());
    }
}
BENCHMARK(BM_SingleNetTrainStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
