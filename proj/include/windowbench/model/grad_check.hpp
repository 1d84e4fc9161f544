#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace wb::model {

struct GradCheckResult {
    double max_rel_err = 0.0;
    size_t worst_index = 0;
    double analytic_at_worst = 0.0;
    double numeric_at_worst = 0.0;
};

// Central-difference check of an analytic gradient:
//   numeric_j = (f(x + eps e_j) - f(x - eps e_j)) / (2 eps)
//   rel_err_j = |analytic_j - numeric_j| / (|analytic_j| + |numeric_j| + 1e-12)
GradCheckResult grad_check(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<double>& at, const std::vector<double>& analytic,
                           double eps = 1e-6);

}  // namespace wb::model
