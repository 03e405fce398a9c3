#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dvnet {

/// Dense row-major tensor of doubles. The substrate for all network math;
/// desk-scale sizes keep 64-bit precision cheap and gradient checks reliable.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape);
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }
    static Tensor full(std::vector<std::size_t> shape, double value);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t extent(std::size_t axis) const { return shape_[axis]; }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    double& at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
    }
    double at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
    }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    Tensor reshaped(std::vector<std::size_t> shape) const;

    bool all_finite() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

std::string shape_str(const std::vector<std::size_t>& shape);

namespace detail {

/// Dot product with four interleaved accumulators. The summation order is
/// fixed (lanes combined as (s0+s1)+(s2+s3) at the end), so results are
/// reproducible run to run while the lanes pipeline/vectorize.
inline double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

}  // namespace detail

/// Elementwise arithmetic. Binary forms require identical shapes; the only
/// implicit broadcast is the scalar one (scale).
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);

/// [m,k] x [k,n] -> [m,n]. Fixed i,k,j loop order, so the summation order
/// (and hence the result bits) never varies between runs.
Tensor matmul(const Tensor& a, const Tensor& b);

/// Valid cross-correlation. input [C,H,W], kernels [O,C,kh,kw], bias [O]
/// -> [O, H-kh+1, W-kw+1]. out[o,y,x] = bias[o] + sum_{c,i,j} in[c,y+i,x+j] * k[o,c,i,j].
/// No kernel flip and no padding modes; every input channel feeds every
/// output map.
Tensor conv2d_valid(const Tensor& input, const Tensor& kernels, const Tensor& bias);

/// Gradients of conv2d_valid given upstream grad [O,oh,ow].
Tensor conv2d_grad_input(const Tensor& grad_out, const Tensor& kernels,
                         std::size_t in_h, std::size_t in_w);
void conv2d_grad_params(const Tensor& grad_out, const Tensor& input,
                        Tensor& grad_kernels, Tensor& grad_bias);

}  // namespace dvnet
