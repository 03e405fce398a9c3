// Acceptance suite: one pass/fail line per criterion.
//
//   dvnet_acceptance                 runs everything
//   dvnet_acceptance --criterion 4b  runs one criterion
//
// Exit status 0 when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "dvnet/experiments.hpp"
#include "dvnet/gradcheck.hpp"
#include "dvnet/io_util.hpp"
#include "dvnet/parallel.hpp"

using namespace dvnet;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

#define EXPECT(outcome, cond, why)                 \
    do {                                           \
        if (!(cond)) (outcome).fail(why);          \
    } while (0)

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

Tensor random_tensor(std::vector<std::size_t> shape, SplitMix64& rng, double lo = -1.0,
                     double hi = 1.0) {
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
    return t;
}

double weighted_sum(const Tensor& upstream, const Tensor& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += upstream[i] * y[i];
    return s;
}

// ---------------------------------------------------------------------------
// independent oracles (test-side reimplementations)

Tensor conv_oracle(const Tensor& input, const Tensor& kernels, const Tensor& bias) {
    const std::size_t c_in = input.extent(0), h = input.extent(1), w = input.extent(2);
    const std::size_t c_out = kernels.extent(0), kh = kernels.extent(2), kw = kernels.extent(3);
    Tensor out({c_out, h - kh + 1, w - kw + 1});
    for (std::size_t o = 0; o < c_out; ++o) {
        for (std::size_t y = 0; y + kh <= h; ++y) {
            for (std::size_t x = 0; x + kw <= w; ++x) {
                double acc = bias[o];
                for (std::size_t c = 0; c < c_in; ++c) {
                    for (std::size_t i = 0; i < kh; ++i) {
                        for (std::size_t j = 0; j < kw; ++j) {
                            acc += input.at(c, y + i, x + j) * kernels.at(o, c, i, j);
                        }
                    }
                }
                out.at(o, y, x) = acc;
            }
        }
    }
    return out;
}

double auc_oracle(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[i] == 1 && labels[j] == 0) {
                ++pairs;
                if (scores[i] > scores[j]) {
                    wins += 1.0;
                } else if (scores[i] == scores[j]) {
                    wins += 0.5;
                }
            }
        }
    }
    return wins / static_cast<double>(pairs);
}

int otsu_oracle(const GrayImage& img) {
    int best_t = 255;
    double best_var = 0.0;
    for (int t = 1; t < 256; ++t) {
        double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
        for (std::uint8_t p : img.pixels) {
            if (p < t) {
                n0 += 1;
                s0 += p;
            } else {
                n1 += 1;
                s1 += p;
            }
        }
        if (n0 == 0 || n1 == 0) continue;
        const double total = n0 + n1;
        const double var = (n0 / total) * (n1 / total) * (s0 / n0 - s1 / n1) * (s0 / n0 - s1 / n1);
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }
    return best_t;
}

GrayImage random_image(std::size_t w, std::size_t h, SplitMix64& rng) {
    GrayImage img(w, h);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.below(256));
    return img;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

// shared trend configuration: seed 42, 5 repeat seeds, 200 train / 100 test
ExperimentConfig trend_config(const char* experiment, std::uint64_t seed, Difficulty difficulty) {
    ExperimentConfig config;
    config.experiment = experiment;
    config.seed = seed;
    config.dataset.n_benign = 150;
    config.dataset.n_malignant = 150;
    config.dataset.difficulty = difficulty;
    config.split.test_fraction = 1.0 / 3.0;
    config.train.epochs = 8;
    config.train.batch_size = 16;
    config.train.learning_rate = 0.05;
    config.train.seed = seed;
    return config;
}

constexpr std::uint64_t kTrendSeed = 42;
constexpr int kRepeats = 5;

std::map<std::string, std::vector<double>> run_repeated(const char* experiment,
                                                        Difficulty difficulty) {
    std::vector<ResultTable> tables(kRepeats);
    parallel_for(kRepeats, [&](std::size_t r) {
        tables[r] = run_experiment(
            trend_config(experiment, kTrendSeed + r, difficulty));
    });
    std::map<std::string, std::vector<double>> aucs;
    for (const ResultTable& table : tables) {
        for (const ResultRow& row : table.rows) {
            if (row.ok) aucs[row.method].push_back(row.report.auc);
        }
    }
    return aucs;
}

// ---------------------------------------------------------------------------
// criterion 1: gradient correctness, 50 probes per layer type, tol 1e-4

Outcome criterion_gradients() {
    Outcome outcome;
    const auto started = Clock::now();
    const double tol = 1e-4;
    const double eps = 1e-5;
    SplitMix64 seeds(0x6AD5);

    auto report_max = [&outcome, tol](const char* layer, double worst) {
        outcome.note(std::string(layer) + " max_rel=" + fmt(worst));
        EXPECT(outcome, worst <= tol, std::string(layer) + " exceeded tolerance");
    };

    {  // conv: input and kernel gradients
        double worst = 0.0;
        for (int probe = 0; probe < 50; ++probe) {
            SplitMix64 rng(seeds.next_u64());
            Conv2dLayer conv(2, 3, 3, 3);
            conv.init_glorot(rng);
            const Tensor x = random_tensor({2, 6, 6}, rng);
            const Tensor upstream = random_tensor({3, 4, 4}, rng);
            conv.forward(x);
            for (Tensor* g : conv.grads()) std::fill(g->values().begin(), g->values().end(), 0.0);
            const Tensor gin = conv.backward(upstream);
            auto fx = [&](const Tensor& probe_x) {
                return weighted_sum(upstream, conv.forward_pure(probe_x));
            };
            worst = std::max(worst, finite_difference_check(fx, x, gin, eps, tol).max_rel_diff);

            // weight gradients through the same probe
            const Tensor w = *conv.params()[0];
            const Tensor gw = *conv.grads()[0];
            Conv2dLayer scratch(2, 3, 3, 3);
            auto fw = [&](const Tensor& probe_w) {
                return weighted_sum(upstream, conv2d_valid(x, probe_w, conv.bias()));
            };
            worst = std::max(worst, finite_difference_check(fw, w, gw, eps, tol).max_rel_diff);
        }
        report_max("conv", worst);
    }

    {  // dense: input and weight gradients
        double worst = 0.0;
        for (int probe = 0; probe < 50; ++probe) {
            SplitMix64 rng(seeds.next_u64());
            DenseLayer dense(10, 7);
            dense.init_glorot(rng);
            const Tensor x = random_tensor({10}, rng);
            const Tensor upstream = random_tensor({7}, rng);
            dense.forward(x);
            for (Tensor* g : dense.grads()) std::fill(g->values().begin(), g->values().end(), 0.0);
            const Tensor gin = dense.backward(upstream);
            auto fx = [&](const Tensor& probe_x) {
                return weighted_sum(upstream, dense.forward_pure(probe_x));
            };
            worst = std::max(worst, finite_difference_check(fx, x, gin, eps, tol).max_rel_diff);

            const Tensor w = *dense.params()[0];
            const Tensor gw = *dense.grads()[0];
            auto fw = [&](const Tensor& probe_w) {
                return weighted_sum(upstream, dense_forward(x, probe_w, *dense.params()[1]));
            };
            worst = std::max(worst, finite_difference_check(fw, w, gw, eps, tol).max_rel_diff);
        }
        report_max("dense", worst);
    }

    for (ActKind kind : {ActKind::sigmoid, ActKind::tanh, ActKind::relu}) {
        double worst = 0.0;
        for (int probe = 0; probe < 50; ++probe) {
            SplitMix64 rng(seeds.next_u64());
            Tensor x = random_tensor({12}, rng, -2.0, 2.0);
            if (kind == ActKind::relu) {
                // kink exclusion: keep probes clear of 0
                for (std::size_t i = 0; i < x.size(); ++i) {
                    while (std::abs(x[i]) < 1e-3) x[i] = rng.uniform(-2.0, 2.0);
                }
            }
            const Tensor upstream = random_tensor({12}, rng);
            const Tensor grad = activation_backward(kind, x, upstream);
            auto f = [&](const Tensor& probe_x) {
                return weighted_sum(upstream, apply_activation(kind, probe_x));
            };
            worst = std::max(worst, finite_difference_check(f, x, grad, eps, tol).max_rel_diff);
        }
        report_max(act_name(kind), worst);
    }

    {  // maxpool, tie-excluded probes
        double worst = 0.0;
        for (int probe = 0; probe < 50; ++probe) {
            SplitMix64 rng(seeds.next_u64());
            Tensor x({2, 6, 6});
            bool clean = false;
            while (!clean) {
                for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1.0, 1.0);
                clean = true;
                for (std::size_t c = 0; c < 2 && clean; ++c) {
                    for (std::size_t y = 0; y < 6 && clean; y += 2) {
                        for (std::size_t xx = 0; xx < 6 && clean; xx += 2) {
                            double top = -2.0, second = -3.0;
                            for (std::size_t dy = 0; dy < 2; ++dy) {
                                for (std::size_t dx = 0; dx < 2; ++dx) {
                                    const double v = x.at(c, y + dy, xx + dx);
                                    if (v > top) {
                                        second = top;
                                        top = v;
                                    } else if (v > second) {
                                        second = v;
                                    }
                                }
                            }
                            if (top - second < 1e-3) clean = false;
                        }
                    }
                }
            }
            const MaxPoolResult pooled = maxpool2x2(x);
            const Tensor upstream = random_tensor({2, 3, 3}, rng);
            const Tensor gin = maxpool2x2_backward(pooled.argmax, x.shape(), upstream);
            auto f = [&](const Tensor& probe_x) {
                return weighted_sum(upstream, maxpool2x2(probe_x).output);
            };
            worst = std::max(worst, finite_difference_check(f, x, gin, eps, tol).max_rel_diff);
        }
        report_max("maxpool", worst);
    }

    {  // softmax cross-entropy
        double worst = 0.0;
        for (int probe = 0; probe < 50; ++probe) {
            SplitMix64 rng(seeds.next_u64());
            const Tensor logits = random_tensor({6}, rng, -3.0, 3.0);
            const std::size_t target = rng.below(6);
            const SoftmaxLoss loss = softmax_cross_entropy(logits, target);
            auto f = [&](const Tensor& probe_logits) {
                return softmax_cross_entropy(probe_logits, target).loss;
            };
            worst = std::max(
                worst, finite_difference_check(f, logits, loss.grad_logits, eps, tol).max_rel_diff);
        }
        report_max("softmax-xent", worst);
    }

    const double seconds = std::chrono::duration<double>(Clock::now() - started).count();
    outcome.note("runtime " + fmt(seconds) + " s");
    EXPECT(outcome, seconds < 60.0, "gradient checks exceeded 60 s");
    return outcome;
}

// ---------------------------------------------------------------------------
// criterion 2: oracle equivalence

Outcome criterion_oracles() {
    Outcome outcome;

    {  // conv vs quadruple loop, <= 1e-12 absolute
        SplitMix64 seeds(0xAC2);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            SplitMix64 rng(seeds.next_u64());
            const std::size_t kh = 1 + rng.below(5), kw = 1 + rng.below(5);
            const std::size_t h = kh + rng.below(16 - kh + 1), w = kw + rng.below(16 - kw + 1);
            const std::size_t c_in = 1 + rng.below(3), c_out = 1 + rng.below(3);
            const Tensor input = random_tensor({c_in, h, w}, rng);
            const Tensor kernels = random_tensor({c_out, c_in, kh, kw}, rng);
            const Tensor bias = random_tensor({c_out}, rng);
            const Tensor got = conv2d_valid(input, kernels, bias);
            const Tensor expect = conv_oracle(input, kernels, bias);
            for (std::size_t i = 0; i < got.size(); ++i) {
                worst = std::max(worst, std::abs(got[i] - expect[i]));
            }
        }
        outcome.note("conv_vs_oracle max_abs=" + fmt(worst));
        EXPECT(outcome, worst <= 1e-12, "conv oracle mismatch");
    }

    {  // auc vs pair counting, exact
        SplitMix64 rng(0xA0C);
        bool exact = true;
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> scores;
            std::vector<int> labels;
            const std::size_t n = 20 + rng.below(60);
            for (std::size_t i = 0; i < n; ++i) {
                // quantized scores force ties
                scores.push_back(static_cast<double>(rng.below(12)) / 11.0);
                labels.push_back(static_cast<int>(rng.below(2)));
            }
            labels[0] = 0;
            labels[1] = 1;
            if (compute_auc(scores, labels) != auc_oracle(scores, labels)) exact = false;
        }
        EXPECT(outcome, exact, "auc differs from pair-count oracle");
        outcome.note("auc exact");
    }

    {  // fft vs direct dft at 8x8, <= 1e-9
        SplitMix64 rng(0xFF7);
        const GrayImage img = random_image(8, 8, rng);
        const FreqImage fast = fft2_forward(img);
        double worst = 0.0;
        for (std::size_t v = 0; v < 8; ++v) {
            for (std::size_t u = 0; u < 8; ++u) {
                std::complex<double> acc(0.0, 0.0);
                for (std::size_t y = 0; y < 8; ++y) {
                    for (std::size_t x = 0; x < 8; ++x) {
                        const double angle = -2.0 * M_PI *
                                             (static_cast<double>(u) * x + static_cast<double>(v) * y) /
                                             8.0;
                        acc += static_cast<double>(img.at(y, x)) *
                               std::complex<double>(std::cos(angle), std::sin(angle));
                    }
                }
                worst = std::max(worst,
                                 std::abs(fast.at((v + 4) % 8, (u + 4) % 8) - acc));
            }
        }
        outcome.note("fft_vs_dft max_abs=" + fmt(worst));
        EXPECT(outcome, worst <= 1e-9, "fft oracle mismatch at 8x8");
    }

    {  // otsu vs exhaustive scan, exact
        SplitMix64 rng(0x075);
        bool exact = true;
        for (int trial = 0; trial < 100; ++trial) {
            const GrayImage img = random_image(12, 12, rng);
            if (otsu_threshold(img) != otsu_oracle(img)) exact = false;
        }
        EXPECT(outcome, exact, "otsu differs from exhaustive scan");
        outcome.note("otsu exact");
    }

    {  // knn vs brute-force distance sort, exact
        SplitMix64 rng(0xE11);
        LabeledSet data;
        for (int i = 0; i < 40; ++i) {
            data.features.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                     rng.uniform(-1.0, 1.0)});
            data.labels.push_back(static_cast<int>(rng.below(2)));
        }
        data.labels[0] = 0;
        data.labels[1] = 1;
        const TrainedClassifier clf = train_knn(data, 5);
        const Standardizer scaler = Standardizer::fit(data.features);
        bool exact = true;
        for (int probe = 0; probe < 50; ++probe) {
            const std::vector<double> x{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                        rng.uniform(-1.0, 1.0)};
            const std::vector<double> xs = scaler.apply(x);
            std::vector<std::pair<double, std::size_t>> dist;
            for (std::size_t i = 0; i < data.size(); ++i) {
                const std::vector<double> ts = scaler.apply(data.features[i]);
                double d2 = 0.0;
                for (std::size_t j = 0; j < 3; ++j) d2 += (ts[j] - xs[j]) * (ts[j] - xs[j]);
                dist.push_back({d2, i});
            }
            std::sort(dist.begin(), dist.end());
            double expect = 0.0;
            for (int k = 0; k < 5; ++k) expect += data.labels[dist[k].second];
            if (clf.predict_score(x) != expect / 5.0) exact = false;
        }
        EXPECT(outcome, exact, "knn differs from brute-force sort");
        outcome.note("knn exact");
    }

    return outcome;
}

// ---------------------------------------------------------------------------
// criterion 3: the per-operation examples, exactly as stated

Outcome criterion_examples() {
    Outcome outcome;
    auto expect_eq = [&outcome](bool cond, const char* what) {
        EXPECT(outcome, cond, std::string("example failed: ") + what);
    };

    // tensor-core
    expect_eq(add(Tensor({2}, {1, 2}), Tensor({2}, {3, 4})).values() ==
                  std::vector<double>{4, 6},
              "add");
    expect_eq(scale(Tensor({2}, {1, -2}), 0.0).values() == std::vector<double>{0, 0}, "scale0");
    expect_eq(mul(Tensor({2}, {2, 3}), Tensor({2}, {4, 5})).values() ==
                  std::vector<double>{8, 15},
              "mul");
    {
        const Tensor eye({2, 2}, {1, 0, 0, 1});
        const Tensor m({2, 2}, {5, 6, 7, 8});
        expect_eq(matmul(eye, m).values() == m.values(), "matmul identity");
        expect_eq(matmul(Tensor({1, 2}, {1, 2}), Tensor({2, 1}, {3, 4})).values() ==
                      std::vector<double>{11},
                  "matmul dot");
        SplitMix64 rng(0x3417);
        const Tensor a = random_tensor({3, 4}, rng);
        const Tensor b = random_tensor({4, 2}, rng);
        const Tensor got = matmul(a, b);
        Tensor expect({3, 2});
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 2; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < 4; ++k) acc += a.at(i, k) * b.at(k, j);
                expect.at(i, j) = acc;
            }
        }
        bool close = true;
        for (std::size_t i = 0; i < got.size(); ++i) {
            if (std::abs(got[i] - expect[i]) > 1e-13) close = false;
        }
        expect_eq(close, "matmul random vs triple loop");
    }
    expect_eq(conv2d_valid(Tensor({1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9}),
                           Tensor({1, 1, 2, 2}, {1, 0, 0, 1}), Tensor({1}))
                      .values() == std::vector<double>{6, 8, 12, 14},
              "conv worked example");
    {
        const Tensor x({1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
        expect_eq(conv2d_valid(x, Tensor({1, 1, 1, 1}, {1}), Tensor({1})).values() == x.values(),
                  "conv identity kernel");
        bool all5 = true;
        const Tensor biased =
            conv2d_valid(Tensor({1, 4, 4}), Tensor({2, 1, 2, 2}), Tensor({2}, {5, 5}));
        for (double v : biased.values()) {
            if (v != 5.0) all5 = false;
        }
        expect_eq(all5, "conv bias only");
    }
    {
        auto sum_sq = [](const Tensor& t) {
            double s = 0.0;
            for (std::size_t i = 0; i < t.size(); ++i) s += t[i] * t[i];
            return s;
        };
        const Tensor x({2}, {1, 2});
        expect_eq(finite_difference_check(sum_sq, x, Tensor({2}, {2, 4}), 1e-5, 1e-6).passed,
                  "gradcheck quadratic");
        auto sum = [](const Tensor& t) {
            double s = 0.0;
            for (std::size_t i = 0; i < t.size(); ++i) s += t[i];
            return s;
        };
        expect_eq(finite_difference_check(sum, x, Tensor({2}, {1, 1}), 1e-5, 1e-6).passed,
                  "gradcheck linear");
        expect_eq(!finite_difference_check(sum_sq, x, Tensor({2}, {2, 3.9}), 1e-5, 1e-6).passed,
                  "gradcheck constructed failure");
    }

    // nn-layers
    expect_eq(apply_activation(ActKind::sigmoid, Tensor({1}))[0] == 0.5, "sigmoid(0)");
    expect_eq(apply_activation(ActKind::tanh, Tensor({1}))[0] == 0.0, "tanh(0)");
    expect_eq(apply_activation(ActKind::relu, Tensor({2}, {-2, 3})).values() ==
                  std::vector<double>{0, 3},
              "relu");
    expect_eq(activation_backward(ActKind::sigmoid, Tensor({1}), Tensor({1}, {1}))[0] == 0.25,
              "sigmoid'(0)");
    expect_eq(activation_backward(ActKind::relu, Tensor({1}), Tensor({1}, {1}))[0] == 0.0,
              "relu'(0)=0");
    expect_eq(maxpool2x2(Tensor({1, 4, 4}, {1, 3, 2, 4, 5, 6, 7, 8, 3, 2, 1, 0, 1, 2, 3, 4}))
                      .output.values() == std::vector<double>{6, 8, 3, 4},
              "maxpool example");
    {
        const Tensor x({2}, {3, 4});
        expect_eq(dense_forward(x, Tensor({2, 2}, {1, 0, 0, 1}), Tensor({2})).values() ==
                      x.values(),
                  "dense identity");
        expect_eq(dense_forward(x, Tensor({2, 2}), Tensor({2}, {1, 2})).values() ==
                      std::vector<double>{1, 2},
                  "dense bias only");
    }
    {
        const SoftmaxLoss uniform = softmax_cross_entropy(Tensor({2}), 0);
        expect_eq(std::abs(uniform.loss - std::log(2.0)) < 1e-12, "xent ln2");
        const SoftmaxLoss stable = softmax_cross_entropy(Tensor({2}, {1000, -1000}), 0);
        expect_eq(stable.loss == 0.0 && std::isfinite(stable.grad_logits[0]), "xent stability");
    }
    {
        TrainConfig cfg;
        cfg.learning_rate = 0.1;
        Tensor p({1}, {1});
        Tensor g({1}, {1});
        sgd_step({&p}, {&g}, cfg);
        expect_eq(std::abs(p[0] - 0.9) < 1e-15, "sgd definition");
        Tensor w({1}, {0});
        for (int i = 0; i < 200; ++i) {
            Tensor grad({1}, {2.0 * (w[0] - 3.0)});
            sgd_step({&w}, {&grad}, cfg);
        }
        expect_eq(std::abs(w[0] - 3.0) < 1e-6, "sgd contraction");
    }
    {
        Network a(single_net_spec(), 7);
        Network b(single_net_spec(), 7);
        bool identical = true;
        auto pa = a.parameters(), pb = b.parameters();
        for (std::size_t i = 0; i < pa.size(); ++i) {
            if (pa[i]->values() != pb[i]->values()) identical = false;
        }
        expect_eq(identical, "init determinism");
        bool zero_bias = true;
        for (std::size_t i = 1; i < pa.size(); i += 2) {
            for (double v : pa[i]->values()) {
                if (v != 0.0) zero_bias = false;
            }
        }
        expect_eq(zero_bias, "init zero biases");
        const std::string bytes = serialize_network(a);
        expect_eq(serialize_network(deserialize_network(bytes)) == bytes, "checkpoint roundtrip");
        bool threw = false;
        try {
            deserialize_network(bytes.substr(0, bytes.size() / 2));
        } catch (const ParseError&) {
            threw = true;
        }
        expect_eq(threw, "checkpoint truncation");
    }

    // preprocess
    {
        const GrayImage constant(6, 6, 40);
        expect_eq(median_filter(constant, 1) == constant, "median constant");
        GrayImage salt(8, 8, 0);
        salt.at(4, 4) = 255;
        expect_eq(median_filter(salt, 1).at(4, 4) == 0, "median salt");
        const GrayImage ceq = histogram_equalize(GrayImage(5, 5, 97));
        bool all255 = true;
        for (auto p : ceq.pixels) {
            if (p != 255) all255 = false;
        }
        expect_eq(all255, "histeq constant -> 255");
        GrayImage two(8, 8, 0);
        for (std::size_t i = 0; i < 32; ++i) two.pixels[i] = 255;
        const auto lut = histogram_equalize_lut(two);
        expect_eq((lut[0] == 127 || lut[0] == 128) && lut[255] == 255, "histeq two-level");
    }
    {
        const GrayImage c(8, 4, 13);
        const FreqImage f = fft2_forward(c);
        expect_eq(std::abs(f.at(f.dc_v(), f.dc_u()) - 13.0 * 32) <= 1e-9, "fft dc = sum");
        expect_eq(std::abs(butterworth_gain(0.0, 5.0, 3) - 1.0) == 0.0, "butterworth dc");
        bool half = true;
        for (unsigned n = 1; n <= 4; ++n) {
            if (std::abs(butterworth_gain(5.0, 5.0, n) - 0.5) > 1e-12) half = false;
        }
        expect_eq(half, "butterworth half at d0");
        expect_eq(butterworth_gain(0.9 * 5, 5, 8) > butterworth_gain(0.9 * 5, 5, 1) &&
                      butterworth_gain(1.1 * 5, 5, 8) < butterworth_gain(1.1 * 5, 5, 1),
                  "butterworth order sharpening");
    }
    {
        GrayImage lone(10, 10, 0);
        lone.at(5, 5) = 255;
        bool removed = true;
        const GrayImage cleaned = morph_open_close(lone, 1);
        for (auto p : cleaned.pixels) {
            if (p != 0) removed = false;
        }
        expect_eq(removed, "opening removes isolated pixel");
        GrayImage square(16, 16, 0);
        for (std::size_t y = 3; y < 13; ++y) {
            for (std::size_t x = 3; x < 13; ++x) square.at(y, x) = 255;
        }
        square.at(8, 8) = 0;
        expect_eq(morph_open_close(square, 1).at(8, 8) == 255, "closing fills hole");
    }
    {
        GrayImage bimodal(10, 10, 10);
        for (std::size_t i = 0; i < 50; ++i) bimodal.pixels[i] = 200;
        const int t = otsu_threshold(bimodal);
        expect_eq(t > 10 && t < 199, "otsu bimodal threshold");
        expect_eq(binarize_otsu(GrayImage(5, 5, 80)).foreground_count() == 0, "otsu constant");
        expect_eq(roi_pipeline(GrayImage(16, 16, 0), {}).shape.foreground_count() == 0,
                  "pipeline all-zero");
    }

    // features
    {
        const FeatureVector hog = hog_descriptor(GrayImage(64, 64, 90));
        expect_eq(hog.length() == 1764, "hog length 1764");
        bool zero = true;
        for (double v : hog.values) {
            if (v != 0.0) zero = false;
        }
        expect_eq(zero, "hog constant -> zero");
        GrayImage img(2, 2, 0);
        img.at(1, 0) = img.at(1, 1) = 255;
        expect_eq(std::abs(glcm_features(img, 2).values[2] - 0.5) < 1e-15, "glcm energy 0.5");
        const FeatureVector cg = glcm_features(GrayImage(8, 8, 50));
        expect_eq(cg.values[2] == 1.0 && cg.values[0] == 0.0, "glcm constant");
        GrayImage ramp(32, 32);
        for (std::size_t y = 0; y < 32; ++y) {
            for (std::size_t x = 0; x < 32; ++x) ramp.at(y, x) = static_cast<std::uint8_t>(4 * x);
        }
        expect_eq(hgd_descriptor(ramp).values[0] == 1.0, "hgd ramp bin 0");
    }

    // classifiers
    {
        SvmParams lin;
        lin.kernel = SvmKernel::linear;
        LabeledSet pair;
        pair.features = {{-1.0}, {1.0}};
        pair.labels = {0, 1};
        const TrainedClassifier svm = train_svm(pair, lin);
        expect_eq(svm.predict_score({-1.0}) < 0.5 && svm.predict_score({1.0}) > 0.5,
                  "svm 1-d pair");
        LabeledSet xorset;
        xorset.features = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
        xorset.labels = {0, 0, 1, 1};
        SvmParams rbf;
        rbf.gamma = 1.0;
        rbf.c = 10.0;
        const TrainedClassifier sx = train_svm(xorset, rbf);
        bool xor_ok = true;
        for (std::size_t i = 0; i < 4; ++i) {
            const int pred = sx.predict_score(xorset.features[i]) > 0.5 ? 1 : 0;
            if (pred != xorset.labels[i]) xor_ok = false;
        }
        expect_eq(xor_ok, "svm xor rbf");

        LabeledSet mix5;
        for (int i = 0; i < 5; ++i) {
            mix5.features.push_back({static_cast<double>(i)});
            mix5.labels.push_back(i < 3 ? 1 : 0);
        }
        expect_eq(train_knn(mix5, 5).predict_score({9.0}) == 0.6, "knn full vote 0.6");

        expect_eq(compute_auc({0.9, 0.8, 0.3, 0.2}, {1, 1, 0, 0}) == 1.0, "auc perfect");
        expect_eq(compute_auc({0.9, 0.8, 0.3, 0.2}, {1, 0, 1, 0}) == 0.75, "auc 0.75");
        expect_eq(compute_auc({0.4, 0.4, 0.4}, {1, 0, 1}) == 0.5, "auc all ties");
    }

    // fusion + synthdata
    {
        expect_eq(std::abs(probability_fusion(0.6, 0.8) - 0.7) < 1e-15, "prob fusion mean");
        expect_eq(probability_fusion(0.3, 0.3) == 0.3, "prob fusion idempotent");
        expect_eq(probability_fusion(0.2, 0.9) == probability_fusion(0.9, 0.2),
                  "prob fusion symmetric");
        expect_eq(single_net_spec().branch_flat_width() == 2304, "flatten width recurrence");
        expect_eq(cnn1_spec().penultimate_width() + cnn2_spec().penultimate_width() == 384,
                  "fused length 384");
        expect_eq(two_views_net_spec().branch_flat_width() * 2 == 4608, "concat width");

        const SynthDataset ds = generate_dataset(71, 74, Difficulty::standard, 5);
        expect_eq(ds.samples.size() == 145 && ds.benign_count == 71 && ds.malignant_count == 74,
                  "generate 145");
        const SynthDataset ds2 = generate_dataset(0, 5, Difficulty::easy, 5);
        bool all_malignant = ds2.samples.size() == 5;
        for (const auto& s : ds2.samples) {
            if (s.label != 1) all_malignant = false;
        }
        expect_eq(all_malignant, "generate 0/5");
    }

    if (outcome.pass) outcome.note("all worked examples hold");
    return outcome;
}

// ---------------------------------------------------------------------------
// criteria 4a/4b/4c: trend reproduction at seed 42, 5 repeats, medians

Outcome criterion_trend_fusion() {
    Outcome outcome;
    const auto started = Clock::now();
    const auto aucs = run_repeated("features", Difficulty::standard);
    const double cnn1 = median(aucs.at("CNN1"));
    const double cnn2 = median(aucs.at("CNN2"));
    const double fused = median(aucs.at("Feature Fusion CNN"));
    outcome.note("median AUC cnn1=" + fmt(cnn1) + " cnn2=" + fmt(cnn2) + " fused=" + fmt(fused));
    EXPECT(outcome, fused >= std::max(cnn1, cnn2) - 0.02,
           "fused median AUC below max(CNN1, CNN2) - 0.02");
    const double seconds = std::chrono::duration<double>(Clock::now() - started).count();
    outcome.note("runtime " + fmt(seconds) + " s");
    EXPECT(outcome, seconds < 300.0, "trend (a) exceeded 5 minutes");
    return outcome;
}

Outcome criterion_trend_views() {
    Outcome outcome;
    const auto started = Clock::now();
    const auto aucs = run_repeated("views", Difficulty::standard);
    const double coronal = median(aucs.at("Single-Net-Coronal"));
    const double transverse = median(aucs.at("Single-Net-Transverse"));
    const double dual = median(aucs.at("2Views-Net"));
    const double prob = median(aucs.at("Probability fusion"));
    outcome.note("median AUC coronal=" + fmt(coronal) + " transverse=" + fmt(transverse) +
                 " prob_fusion=" + fmt(prob) + " 2views=" + fmt(dual));
    EXPECT(outcome, dual >= std::max(coronal, transverse) - 0.02,
           "2Views-Net median AUC below max(single views) - 0.02");
    const double seconds = std::chrono::duration<double>(Clock::now() - started).count();
    outcome.note("runtime " + fmt(seconds) + " s");
    EXPECT(outcome, seconds < 300.0, "trend (b) exceeded 5 minutes");
    return outcome;
}

Outcome criterion_trend_ratios() {
    Outcome outcome;
    const auto started = Clock::now();
    const auto aucs = run_repeated("ratios", Difficulty::standard);
    const double balanced = median(aucs.at("1:1"));
    const double skewed = median(aucs.at("2:1"));
    const double mid = median(aucs.at("1.3:1"));
    outcome.note("median AUC 2:1=" + fmt(skewed) + " 1.3:1=" + fmt(mid) + " 1:1=" + fmt(balanced));
    EXPECT(outcome, balanced >= skewed, "balanced-ratio median AUC below the 2:1 median");
    const double seconds = std::chrono::duration<double>(Clock::now() - started).count();
    outcome.note("runtime " + fmt(seconds) + " s");
    EXPECT(outcome, seconds < 300.0, "trend (c) exceeded 5 minutes");
    return outcome;
}

// ---------------------------------------------------------------------------
// criterion 5: easy-mode sanity floor, every Table 2-3 method >= 0.95 AUC

Outcome criterion_easy_floor() {
    Outcome outcome;
    ResultTable features, classifiers;
    {
        std::vector<ResultTable> tables(2);
        parallel_for(2, [&](std::size_t i) {
            tables[i] = run_experiment(trend_config(i == 0 ? "features" : "classifiers",
                                                    kTrendSeed, Difficulty::easy));
        });
        features = tables[0];
        classifiers = tables[1];
    }
    for (const ResultTable* table : {&features, &classifiers}) {
        for (const ResultRow& row : table->rows) {
            EXPECT(outcome, row.ok, row.method + " errored: " + row.error);
            if (row.ok) {
                outcome.note(row.method + "=" + fmt(row.report.auc));
                EXPECT(outcome, row.report.auc >= 0.95, row.method + " below the 0.95 floor");
            }
        }
    }
    return outcome;
}

// ---------------------------------------------------------------------------
// criterion 6: end-to-end determinism + checkpoint round trip

Outcome criterion_determinism() {
    Outcome outcome;
    const fs::path root = fs::temp_directory_path() / "dvnet_acceptance_det";
    fs::remove_all(root);

    ExperimentConfig config;  // the default config, full pipeline
    config.experiment = "features";
    config.train.epochs = 10;

    // each run works in its own directory with identical relative paths,
    // the way a user reruns the same commands
    auto run_once = [&](const std::string& tag) {
        const fs::path base = root / tag;
        fs::create_directories(base);
        const fs::path old_cwd = fs::current_path();
        fs::current_path(base);
        cmd_generate(config, "dataset", false);
        ExperimentConfig run_config = config;
        run_config.dataset.dir = "dataset";
        cmd_preprocess("dataset", "prep", config.pipeline, config);
        cmd_run(run_config, "results");
        const ReportOutcome report = cmd_report({"results"});
        write_file_atomic("summary/summary.csv", report.summary_csv);
        write_file_atomic("summary/summary.txt", report.summary_text);
        fs::current_path(old_cwd);
        return base;
    };

    const fs::path a = run_once("a");
    const fs::path b = run_once("b");

    // every emitted byte must match, dataset PGMs included
    std::size_t compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file()) continue;
        const fs::path rel = fs::relative(entry.path(), a);
        const fs::path other = b / rel;
        if (!fs::exists(other)) {
            outcome.fail("missing on rerun: " + rel.string());
            continue;
        }
        if (read_file(entry.path().string()) != read_file(other.string())) {
            outcome.fail("byte mismatch: " + rel.string());
        }
        ++compared;
    }
    outcome.note(std::to_string(compared) + " files byte-identical");
    EXPECT(outcome, compared > 290, "unexpectedly few files compared");

    // the run itself must differ only when the config does
    const ResultTable ta =
        ResultTable::from_csv(read_file((a / "results" / "results.csv").string()));
    EXPECT(outcome, ta.complete(), "default features run had errored rows");

    // checkpoint round trip preserves test predictions bit-exactly
    {
        const SynthDataset ds = generate_dataset(12, 12, Difficulty::standard, 7);
        const SplitResult split = stratified_split(ds, 0.25, 7);
        Network net(single_net_spec(), 7);
        std::vector<TrainSample> samples;
        for (const auto& s : split.train.samples) {
            samples.push_back({{net_input(s.coronal, net.arch())}, s.label});
        }
        TrainConfig tc;
        tc.epochs = 2;
        tc.batch_size = 8;
        tc.seed = 7;
        train_network(net, samples, tc);
        const fs::path ckpt = root / "single.dvnet";
        save_network(net, ckpt.string());
        Network restored = load_network(ckpt.string());
        bool identical = true;
        for (const auto& s : split.test.samples) {
            const std::vector<Tensor> in{net_input(s.coronal, net.arch())};
            if (net.predict_prob(in) != restored.predict_prob(in)) identical = false;
        }
        EXPECT(outcome, identical, "restored checkpoint predictions differ");
        outcome.note("checkpoint round trip bit-exact");
    }

    fs::remove_all(root);
    return outcome;
}

// ---------------------------------------------------------------------------
// criterion 7: preprocessing analytics

Outcome criterion_preprocess_analytics() {
    Outcome outcome;

    double worst = 0.0;
    for (unsigned n = 1; n <= 4; ++n) {
        worst = std::max(worst, std::abs(butterworth_gain(7.0, 7.0, n) - 0.5));
        worst = std::max(worst, std::abs(butterworth_gain(0.125, 0.125, n) - 0.5));
    }
    outcome.note("butterworth |H(d0)-0.5| max=" + fmt(worst));
    EXPECT(outcome, worst <= 1e-12, "butterworth gain at the cutoff is off");

    SplitMix64 rng(0x9A7);
    bool monotone = true;
    for (int trial = 0; trial < 50; ++trial) {
        const GrayImage img = random_image(24, 24, rng);
        const auto lut = histogram_equalize_lut(img);
        for (int v = 1; v < 256; ++v) {
            if (lut[v] < lut[v - 1]) monotone = false;
        }
    }
    EXPECT(outcome, monotone, "histogram-equalization LUT not monotone");
    outcome.note("lut monotone on 50 random images");

    bool idempotent = true;
    for (int trial = 0; trial < 100; ++trial) {
        BinaryMask mask(16, 16);
        for (auto& bit : mask.bits) bit = rng.below(100) < 35 ? 1 : 0;
        const BinaryMask once = morph_open_close(mask, 1);
        if (!(morph_open_close(once, 1) == once)) idempotent = false;
    }
    EXPECT(outcome, idempotent, "open/close not idempotent");
    outcome.note("open/close idempotent on 100 random masks");

    return outcome;
}

struct Criterion {
    const char* id;
    const char* title;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    std::string only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = argv[++i];
    }

    const std::vector<Criterion> criteria = {
        {"1", "gradient correctness (50 probes/layer, tol 1e-4)", criterion_gradients},
        {"2", "oracle equivalence (conv, auc, fft, otsu, knn)", criterion_oracles},
        {"3", "unit-example suite", criterion_examples},
        {"4a", "trend: fused features vs single CNNs", criterion_trend_fusion},
        {"4b", "trend: 2Views-Net vs single views", criterion_trend_views},
        {"4c", "trend: balanced vs skewed training ratio", criterion_trend_ratios},
        {"5", "easy-mode sanity floor (AUC >= 0.95 everywhere)", criterion_easy_floor},
        {"6", "end-to-end determinism + checkpoint round trip", criterion_determinism},
        {"7", "preprocessing analytics", criterion_preprocess_analytics},
    };

    bool all_pass = true;
    bool ran_any = false;
    for (const Criterion& criterion : criteria) {
        if (!only.empty() && only != criterion.id) continue;
        ran_any = true;
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome.fail(std::string("exception: ") + e.what());
        }
        std::printf("[%s] criterion %-2s %s\n      %s\n", outcome.pass ? "PASS" : "FAIL",
                    criterion.id, criterion.title, outcome.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && outcome.pass;
    }
    if (!ran_any) {
        std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
        return 2;
    }
    return all_pass ? 0 : 1;
}
