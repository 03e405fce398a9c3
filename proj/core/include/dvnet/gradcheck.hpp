#pragma once

#include <cstddef>
#include <functional>

#include "dvnet/tensor.hpp"

namespace dvnet {

struct GradCheckReport {
    double max_abs_diff = 0.0;
    double max_rel_diff = 0.0;
    bool passed = false;
    std::size_t probe_count = 0;
};

/// Central-difference check of an analytic gradient, one probe per
/// coordinate of x. Relative diff uses max(1, |analytic|, |numeric|) as the
/// denominator; passed = (max_rel_diff <= tolerance).
GradCheckReport finite_difference_check(const std::function<double(const Tensor&)>& f,
                                        const Tensor& x, const Tensor& analytic_grad,
                                        double epsilon, double tolerance);

}  // namespace dvnet
