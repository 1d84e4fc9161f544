#include "windowbench/model/grad_check.hpp"

#include <cmath>

#include "windowbench/error.hpp"

namespace wb::model {

GradCheckResult grad_check(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<double>& at, const std::vector<double>& analytic,
                           double eps) {
    if (at.size() != analytic.size())
        throw InvariantError("grad_check: gradient length mismatch");
    if (!(eps > 0)) throw InvariantError("grad_check: eps must be positive");
    GradCheckResult result;
    std::vector<double> x = at;
    for (size_t j = 0; j < x.size(); ++j) {
        double orig = x[j];
        x[j] = orig + eps;
        double hi = f(x);
        x[j] = orig - eps;
        double lo = f(x);
        x[j] = orig;
        double numeric = (hi - lo) / (2.0 * eps);
        double rel = std::abs(analytic[j] - numeric) /
                     (std::abs(analytic[j]) + std::abs(numeric) + 1e-12);
        if (rel > result.max_rel_err) {
            result.max_rel_err = rel;
            result.worst_index = j;
            result.analytic_at_worst = analytic[j];
            result.numeric_at_worst = numeric;
        }
    }
    return result;
}

}  // namespace wb::model
