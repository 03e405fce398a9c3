#include "dvnet/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "dvnet/error.hpp"

namespace dvnet {

GradCheckReport finite_difference_check(const std::function<double(const Tensor&)>& f,
                                        const Tensor& x, const Tensor& analytic_grad,
                                        double epsilon, double tolerance) {
    if (epsilon <= 0.0) throw ParamError("finite_difference_check: epsilon must be > 0");
    if (!x.same_shape(analytic_grad)) {
        throw ShapeError("finite_difference_check: gradient shape " +
                         shape_str(analytic_grad.shape()) + " does not match x " +
                         shape_str(x.shape()));
    }
    if (!std::isfinite(f(x))) {
        throw NumericError("finite_difference_check: f(x) is not finite");
    }

    GradCheckReport report;
    Tensor probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = probe[i];
        probe[i] = orig + epsilon;
        const double fp = f(probe);
        probe[i] = orig - epsilon;
        const double fm = f(probe);
        probe[i] = orig;
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            throw NumericError("finite_difference_check: perturbed f is not finite");
        }
        const double numeric = (fp - fm) / (2.0 * epsilon);
        const double analytic = analytic_grad[i];
        const double abs_diff = std::abs(numeric - analytic);
        const double denom = std::max({1.0, std::abs(analytic), std::abs(numeric)});
        report.max_abs_diff = std::max(report.max_abs_diff, abs_diff);
        report.max_rel_diff = std::max(report.max_rel_diff, abs_diff / denom);
        ++report.probe_count;
    }
    report.passed = report.max_rel_diff <= tolerance;
    return report;
}

}  // namespace dvnet
