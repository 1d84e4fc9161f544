#pragma once

#include <string>
#include <vector>

#include "windowbench/feat/sparse.hpp"
#include "windowbench/model/linear.hpp"

namespace wb::model {

// One prediction target sharing the feature space with its siblings.
struct TaskData {
    std::string name;
    feat::FeatureMatrix x;
    std::vector<int> y;
    std::vector<double> sample_weights;  // empty = uniform
};

// Per-task weights ride on top of a shared weight vector: the effective
// linear score for task t is (w_shared + w_task[t]) . x + b[t].
struct MultitaskModel {
    std::vector<double> w_shared;
    std::vector<std::vector<double>> w_task;
    std::vector<double> b;
    std::vector<std::string> task_names;
    double lambda_shared = 0.0;
    double lambda_task = 0.0;
    int iterations = 0;
    double final_objective = 0.0;
    bool converged = false;
};

// Objective: sum_t weightedMeanNLL_t + lambda_shared*|w_shared|_2^2
//            + lambda_task * sum_t |w_task[t]|_2^2
// (penalties enter without a 1/2 factor; intercepts are unpenalized).
// Trained by full-batch gradient descent with backtracking line search from
// w = 0, b_t = logit(weighted prevalence of task t).
MultitaskModel train_multitask(const std::vector<TaskData>& tasks, double lambda_shared,
                               double lambda_task, const TrainOptions& opts = {});

std::vector<double> predict_multitask(const MultitaskModel& model, size_t task,
                                      const feat::FeatureMatrix& x);

// Exposed for finite-difference verification. Parameters are passed as the
// flat stack [w_shared | w_task[0] | ... | w_task[T-1] | b[0..T-1]].
double multitask_objective(const std::vector<TaskData>& tasks, double lambda_shared,
                           double lambda_task, const std::vector<double>& params);
std::vector<double> multitask_gradient(const std::vector<TaskData>& tasks, double lambda_shared,
                                       double lambda_task, const std::vector<double>& params);

}  // namespace wb::model
