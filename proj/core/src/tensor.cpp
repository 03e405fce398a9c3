#include "dvnet/tensor.hpp"

#include <cmath>
#include <sstream>

#include "dvnet/error.hpp"

namespace dvnet {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t e : shape) {
        if (e == 0) throw ShapeError("tensor extent must be positive, got shape " + shape_str(shape));
        n *= e;
    }
    return n;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
    }
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_product(shape_)) {
        throw ShapeError("data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_str(shape_));
    }
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
    Tensor t(std::move(shape));
    for (double& v : t.data_) v = value;
    return t;
}

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
    if (shape_product(shape) != size()) {
        throw ShapeError("cannot reshape " + shape_str(shape_) + " to " + shape_str(shape));
    }
    return Tensor(std::move(shape), data_);
}

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

std::string shape_str(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ',';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Tensor out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    Tensor out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
    return out;
}

Tensor scale(const Tensor& a, double s) {
    Tensor out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= s;
    return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2) {
        throw ShapeError("matmul requires rank-2 tensors, got " + shape_str(a.shape()) +
                         " and " + shape_str(b.shape()));
    }
    const std::size_t m = a.extent(0), k = a.extent(1);
    const std::size_t k2 = b.extent(0), n = b.extent(1);
    if (k != k2) {
        throw ShapeError("matmul inner-dimension mismatch " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
    }
    Tensor out({m, n});
    const double* pa = a.data();
    const double* pb = b.data();
    double* po = out.data();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double aik = pa[i * k + kk];
            const double* brow = pb + kk * n;
            double* orow = po + i * n;
            for (std::size_t j = 0; j < n; ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

Tensor conv2d_valid(const Tensor& input, const Tensor& kernels, const Tensor& bias) {
    if (input.rank() != 3 || kernels.rank() != 4 || bias.rank() != 1) {
        throw ShapeError("conv2d_valid expects input [C,H,W], kernels [O,C,kh,kw], bias [O]; got " +
                         shape_str(input.shape()) + ", " + shape_str(kernels.shape()) + ", " +
                         shape_str(bias.shape()));
    }
    const std::size_t c_in = input.extent(0), h = input.extent(1), w = input.extent(2);
    const std::size_t c_out = kernels.extent(0), kc = kernels.extent(1);
    const std::size_t kh = kernels.extent(2), kw = kernels.extent(3);
    if (kc != c_in) {
        throw ShapeError("conv2d_valid channel mismatch: input " + shape_str(input.shape()) +
                         " vs kernels " + shape_str(kernels.shape()));
    }
    if (bias.extent(0) != c_out) {
        throw ShapeError("conv2d_valid bias extent " + shape_str(bias.shape()) +
                         " vs kernels " + shape_str(kernels.shape()));
    }
    if (kh > h || kw > w) {
        throw ShapeError("conv2d_valid kernel " + shape_str(kernels.shape()) +
                         " larger than input " + shape_str(input.shape()));
    }
    const std::size_t oh = h - kh + 1, ow = w - kw + 1;
    Tensor out({c_out, oh, ow});
    double* po = out.data();
    const double* pi = input.data();
    const double* pk = kernels.data();
    for (std::size_t o = 0; o < c_out; ++o) {
        double* omap = po + o * oh * ow;
        const double b = bias[o];
        for (std::size_t i = 0; i < oh * ow; ++i) omap[i] = b;
        for (std::size_t c = 0; c < c_in; ++c) {
            const double* imap = pi + c * h * w;
            const double* kmap = pk + ((o * c_in + c) * kh) * kw;
            for (std::size_t ki = 0; ki < kh; ++ki) {
                const double* krow = kmap + ki * kw;
                for (std::size_t y = 0; y < oh; ++y) {
                    const double* irow = imap + (y + ki) * w;
                    double* __restrict orow = omap + y * ow;
                    if (kw == 3) {
                        const double k0 = krow[0], k1 = krow[1], k2 = krow[2];
                        for (std::size_t x = 0; x < ow; ++x) {
                            orow[x] += k0 * irow[x] + k1 * irow[x + 1] + k2 * irow[x + 2];
                        }
                    } else if (kw == 5) {
                        const double k0 = krow[0], k1 = krow[1], k2 = krow[2], k3 = krow[3],
                                     k4 = krow[4];
                        for (std::size_t x = 0; x < ow; ++x) {
                            orow[x] += k0 * irow[x] + k1 * irow[x + 1] + k2 * irow[x + 2] +
                                       k3 * irow[x + 3] + k4 * irow[x + 4];
                        }
                    } else {
                        for (std::size_t kj = 0; kj < kw; ++kj) {
                            const double kv = krow[kj];
                            for (std::size_t x = 0; x < ow; ++x) orow[x] += kv * irow[x + kj];
                        }
                    }
                }
            }
        }
    }
    return out;
}

Tensor conv2d_grad_input(const Tensor& grad_out, const Tensor& kernels,
                         std::size_t in_h, std::size_t in_w) {
    const std::size_t c_out = kernels.extent(0), c_in = kernels.extent(1);
    const std::size_t kh = kernels.extent(2), kw = kernels.extent(3);
    const std::size_t oh = grad_out.extent(1), ow = grad_out.extent(2);
    Tensor gin({c_in, in_h, in_w});
    double* pg = gin.data();
    const double* pu = grad_out.data();
    const double* pk = kernels.data();
    for (std::size_t o = 0; o < c_out; ++o) {
        const double* umap = pu + o * oh * ow;
        for (std::size_t c = 0; c < c_in; ++c) {
            double* gmap = pg + c * in_h * in_w;
            const double* kmap = pk + ((o * c_in + c) * kh) * kw;
            for (std::size_t ki = 0; ki < kh; ++ki) {
                for (std::size_t kj = 0; kj < kw; ++kj) {
                    const double kv = kmap[ki * kw + kj];
                    for (std::size_t y = 0; y < oh; ++y) {
                        const double* __restrict urow = umap + y * ow;
                        double* __restrict grow = gmap + (y + ki) * in_w + kj;
                        for (std::size_t x = 0; x < ow; ++x) grow[x] += kv * urow[x];
                    }
                }
            }
        }
    }
    return gin;
}

void conv2d_grad_params(const Tensor& grad_out, const Tensor& input,
                        Tensor& grad_kernels, Tensor& grad_bias) {
    const std::size_t c_out = grad_kernels.extent(0), c_in = grad_kernels.extent(1);
    const std::size_t kh = grad_kernels.extent(2), kw = grad_kernels.extent(3);
    const std::size_t h = input.extent(1), w = input.extent(2);
    const std::size_t oh = grad_out.extent(1), ow = grad_out.extent(2);
    const double* pu = grad_out.data();
    const double* pi = input.data();
    double* pk = grad_kernels.data();
    for (std::size_t o = 0; o < c_out; ++o) {
        const double* umap = pu + o * oh * ow;
        double bsum = 0.0;
        for (std::size_t i = 0; i < oh * ow; ++i) bsum += umap[i];
        grad_bias[o] += bsum;
        for (std::size_t c = 0; c < c_in; ++c) {
            const double* imap = pi + c * h * w;
            double* kmap = pk + ((o * c_in + c) * kh) * kw;
            for (std::size_t ki = 0; ki < kh; ++ki) {
                for (std::size_t kj = 0; kj < kw; ++kj) {
                    double acc = 0.0;
                    for (std::size_t y = 0; y < oh; ++y) {
                        acc += detail::dot(imap + (y + ki) * w + kj, umap + y * ow, ow);
                    }
                    kmap[ki * kw + kj] += acc;
                }
            }
        }
    }
}

}  // namespace dvnet
