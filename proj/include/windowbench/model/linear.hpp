#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "windowbench/feat/sparse.hpp"

namespace wb::model {

enum class Penalty { none, l1, l2 };

std::string_view to_string(Penalty p);
Penalty parse_penalty(std::string_view name);

struct LinearModel {
    std::vector<double> w;
    double b = 0.0;
    Penalty penalty = Penalty::none;
    double lambda = 0.0;
    int iterations = 0;
    double final_objective = 0.0;
    bool converged = false;
};

struct TrainOptions {
    double tol = 1e-8;  // objective-decrease convergence threshold
    int max_iter = 2000;
};

// Weighted mean negative log-likelihood plus the penalty term:
// l1 adds lambda*|w|_1 (proximal gradient), l2 adds (lambda/2)*|w|_2^2
// (gradient descent with backtracking line search). The intercept is never
// penalized. Initialization is w = 0, b = logit(weighted prevalence), so for
// l1 with lambda >= l1_lambda_max the weights stay exactly zero.
LinearModel train_lr(const feat::FeatureMatrix& x, const std::vector<int>& y, Penalty penalty,
                     double lambda, const std::vector<double>& sample_weights = {},
                     const TrainOptions& opts = {});

// Overflow-safe sigmoid probabilities, clamped strictly inside (0,1).
std::vector<double> predict(const LinearModel& model, const feat::FeatureMatrix& x);

double sigmoid(double logit);

// Exposed for finite-difference verification and the analytic-threshold test.
double lr_objective(const feat::FeatureMatrix& x, const std::vector<int>& y,
                    const std::vector<double>& sample_weights, const std::vector<double>& w,
                    double b, Penalty penalty, double lambda);
void lr_gradient(const feat::FeatureMatrix& x, const std::vector<int>& y,
                 const std::vector<double>& sample_weights, const std::vector<double>& w, double b,
                 std::vector<double>& grad_w, double& grad_b);  // smooth part only

// max_j |d/dw_j NLL(0, b*)| with b* the prevalence-matching intercept; the
// smallest lambda at which l1 drives every weight to zero.
double l1_lambda_max(const feat::FeatureMatrix& x, const std::vector<int>& y,
                     const std::vector<double>& sample_weights = {});

}  // namespace wb::model
