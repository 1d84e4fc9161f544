#include "windowbench/model/multitask.hpp"

#include <algorithm>
#include <cmath>

#include "windowbench/error.hpp"

namespace wb::model {

namespace {

// ln(1 + e^m) - y*m without overflow.
double nll_term(double margin, int y) {
    double soft = margin > 0 ? margin + std::log1p(std::exp(-margin))
                             : std::log1p(std::exp(margin));
    return soft - static_cast<double>(y) * margin;
}

struct Stacked {
    size_t dim = 0;
    size_t n_tasks = 0;

    size_t size() const { return dim * (1 + n_tasks) + n_tasks; }
    size_t shared_at() const { return 0; }
    size_t task_at(size_t t) const { return dim * (1 + t); }
    size_t bias_at(size_t t) const { return dim * (1 + n_tasks) + t; }
};

struct PreparedTask {
    const TaskData* data = nullptr;
    std::vector<double> weights;  // normalized to sum 1
    double prevalence = 0.5;
};

std::vector<PreparedTask> prepare(const std::vector<TaskData>& tasks, Stacked& layout) {
    if (tasks.empty()) throw ConfigError("train_multitask: no tasks");
    layout.n_tasks = tasks.size();
    layout.dim = static_cast<size_t>(tasks.front().x.dim);
    std::vector<PreparedTask> prepared;
    prepared.reserve(tasks.size());
    for (const TaskData& task : tasks) {
        if (static_cast<size_t>(task.x.dim) != layout.dim)
            throw ConfigError("train_multitask: task '" + task.name +
                              "' feature dimension differs from the first task");
        if (task.y.empty())
            throw ConfigError("train_multitask: task '" + task.name + "' has no examples");
        if (task.x.rows.size() != task.y.size())
            throw InvariantError("train_multitask: feature/label count mismatch in task '" +
                                 task.name + "'");
        if (!task.sample_weights.empty() && task.sample_weights.size() != task.y.size())
            throw InvariantError("train_multitask: sample_weights length mismatch in task '" +
                                 task.name + "'");
        PreparedTask p;
        p.data = &task;
        p.weights.assign(task.y.size(), 1.0);
        if (!task.sample_weights.empty()) p.weights = task.sample_weights;
        double total = 0.0, wpos = 0.0;
        int64_t pos = 0;
        for (size_t i = 0; i < task.y.size(); ++i) {
            int label = task.y[i];
            if (label != 0 && label != 1)
                throw ConfigError("train_multitask: labels must be 0/1 in task '" + task.name +
                                  "'");
            if (p.weights[i] < 0 || !std::isfinite(p.weights[i]))
                throw ConfigError("train_multitask: bad sample weight in task '" + task.name +
                                  "'");
            total += p.weights[i];
            if (label == 1) {
                wpos += p.weights[i];
                ++pos;
            }
        }
        if (pos == 0 || pos == static_cast<int64_t>(task.y.size()))
            throw ConfigError("train_multitask: task '" + task.name +
                              "' is single-class (" + std::to_string(pos) + " of " +
                              std::to_string(task.y.size()) + " positive)");
        if (total <= 0)
            throw ConfigError("train_multitask: sample weights sum to zero in task '" +
                              task.name + "'");
        for (double& w : p.weights) w /= total;
        p.prevalence = std::clamp(wpos / total, 1e-12, 1.0 - 1e-12);
        prepared.push_back(std::move(p));
    }
    return prepared;
}

double objective_impl(const std::vector<PreparedTask>& prepared, const Stacked& layout,
                      double lambda_shared, double lambda_task,
                      const std::vector<double>& params) {
    double obj = 0.0;
    std::vector<double> eff(layout.dim);
    for (size_t t = 0; t < prepared.size(); ++t) {
        const PreparedTask& p = prepared[t];
        for (size_t j = 0; j < layout.dim; ++j)
            eff[j] = params[layout.shared_at() + j] + params[layout.task_at(t) + j];
        double b = params[layout.bias_at(t)];
        for (size_t i = 0; i < p.data->y.size(); ++i)
            obj += p.weights[i] * nll_term(p.data->x.rows[i].dot(eff) + b, p.data->y[i]);
        double task_sq = 0.0;
        for (size_t j = 0; j < layout.dim; ++j)
            task_sq += params[layout.task_at(t) + j] * params[layout.task_at(t) + j];
        obj += lambda_task * task_sq;
    }
    double shared_sq = 0.0;
    for (size_t j = 0; j < layout.dim; ++j)
        shared_sq += params[layout.shared_at() + j] * params[layout.shared_at() + j];
    obj += lambda_shared * shared_sq;
    return obj;
}

std::vector<double> gradient_impl(const std::vector<PreparedTask>& prepared,
                                  const Stacked& layout, double lambda_shared,
                                  double lambda_task, const std::vector<double>& params) {
    std::vector<double> grad(params.size(), 0.0);
    std::vector<double> eff(layout.dim);
    for (size_t t = 0; t < prepared.size(); ++t) {
        const PreparedTask& p = prepared[t];
        for (size_t j = 0; j < layout.dim; ++j)
            eff[j] = params[layout.shared_at() + j] + params[layout.task_at(t) + j];
        double b = params[layout.bias_at(t)];
        for (size_t i = 0; i < p.data->y.size(); ++i) {
            const feat::SparseVector& row = p.data->x.rows[i];
            double resid = p.weights[i] *
                           (sigmoid(row.dot(eff) + b) - static_cast<double>(p.data->y[i]));
            for (const auto& [j, v] : row.entries) {
                grad[layout.shared_at() + static_cast<size_t>(j)] += resid * v;
                grad[layout.task_at(t) + static_cast<size_t>(j)] += resid * v;
            }
            grad[layout.bias_at(t)] += resid;
        }
        for (size_t j = 0; j < layout.dim; ++j)
            grad[layout.task_at(t) + j] += 2.0 * lambda_task * params[layout.task_at(t) + j];
    }
    for (size_t j = 0; j < layout.dim; ++j)
        grad[layout.shared_at() + j] += 2.0 * lambda_shared * params[layout.shared_at() + j];
    return grad;
}

}  // namespace

double multitask_objective(const std::vector<TaskData>& tasks, double lambda_shared,
                           double lambda_task, const std::vector<double>& params) {
    Stacked layout;
    auto prepared = prepare(tasks, layout);
    if (params.size() != layout.size())
        throw InvariantError("multitask_objective: parameter stack size mismatch");
    return objective_impl(prepared, layout, lambda_shared, lambda_task, params);
}

std::vector<double> multitask_gradient(const std::vector<TaskData>& tasks, double lambda_shared,
                                       double lambda_task, const std::vector<double>& params) {
    Stacked layout;
    auto prepared = prepare(tasks, layout);
    if (params.size() != layout.size())
        throw InvariantError("multitask_gradient: parameter stack size mismatch");
    return gradient_impl(prepared, layout, lambda_shared, lambda_task, params);
}

MultitaskModel train_multitask(const std::vector<TaskData>& tasks, double lambda_shared,
                               double lambda_task, const TrainOptions& opts) {
    if (lambda_shared < 0 || lambda_task < 0)
        throw ConfigError("train_multitask: lambdas must be non-negative");
    Stacked layout;
    auto prepared = prepare(tasks, layout);

    std::vector<double> params(layout.size(), 0.0);
    for (size_t t = 0; t < prepared.size(); ++t)
        params[layout.bias_at(t)] =
            std::log(prepared[t].prevalence / (1.0 - prepared[t].prevalence));

    MultitaskModel model;
    model.lambda_shared = lambda_shared;
    model.lambda_task = lambda_task;
    for (const TaskData& task : tasks) model.task_names.push_back(task.name);

    double objective = objective_impl(prepared, layout, lambda_shared, lambda_task, params);
    std::vector<double> trial(params.size());
    double step = 1.0;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        std::vector<double> grad =
            gradient_impl(prepared, layout, lambda_shared, lambda_task, params);
        double gnorm2 = 0.0;
        for (double g : grad) gnorm2 += g * g;

        step = std::min(step * 2.0, 1e6);
        bool accepted = false;
        double trial_obj = 0.0;
        for (int bt = 0; bt < 60; ++bt) {
            for (size_t j = 0; j < params.size(); ++j) trial[j] = params[j] - step * grad[j];
            trial_obj = objective_impl(prepared, layout, lambda_shared, lambda_task, trial);
            if (trial_obj <= objective - 1e-4 * step * gnorm2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            model.converged = true;
            model.iterations = iter;
            break;
        }
        params.swap(trial);
        model.iterations = iter + 1;
        double decrease = objective - trial_obj;
        objective = trial_obj;
        if (decrease < opts.tol) {
            model.converged = true;
            break;
        }
    }
    model.final_objective = objective;

    model.w_shared.assign(params.begin() + static_cast<long>(layout.shared_at()),
                          params.begin() + static_cast<long>(layout.shared_at() + layout.dim));
    model.w_task.resize(layout.n_tasks);
    model.b.resize(layout.n_tasks);
    for (size_t t = 0; t < layout.n_tasks; ++t) {
        model.w_task[t].assign(params.begin() + static_cast<long>(layout.task_at(t)),
                               params.begin() + static_cast<long>(layout.task_at(t) + layout.dim));
        model.b[t] = params[layout.bias_at(t)];
    }
    return model;
}

std::vector<double> predict_multitask(const MultitaskModel& model, size_t task,
                                      const feat::FeatureMatrix& x) {
    if (task >= model.w_task.size())
        throw InvariantError("predict_multitask: task index out of range");
    if (x.dim != static_cast<int32_t>(model.w_shared.size()))
        throw InvariantError("predict_multitask: feature dimension mismatch");
    std::vector<double> eff(model.w_shared.size());
    for (size_t j = 0; j < eff.size(); ++j) eff[j] = model.w_shared[j] + model.w_task[task][j];
    std::vector<double> probs;
    probs.reserve(x.rows.size());
    for (const feat::SparseVector& row : x.rows)
        probs.push_back(sigmoid(row.dot(eff) + model.b[task]));
    return probs;
}

}  // namespace wb::model
