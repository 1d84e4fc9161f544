#include "windowbench/model/linear.hpp"

#include <algorithm>
#include <cmath>

#include "windowbench/error.hpp"

namespace wb::model {

std::string_view to_string(Penalty p) {
    switch (p) {
        case Penalty::none: return "none";
        case Penalty::l1: return "l1";
        default: return "l2";
    }
}

Penalty parse_penalty(std::string_view name) {
    if (name == "none") return Penalty::none;
    if (name == "l1") return Penalty::l1;
    if (name == "l2") return Penalty::l2;
    throw ConfigError("unknown penalty '" + std::string(name) + "'");
}

double sigmoid(double logit) {
    double p = logit >= 0 ? 1.0 / (1.0 + std::exp(-logit))
                          : std::exp(logit) / (1.0 + std::exp(logit));
    return std::clamp(p, 1e-12, 1.0 - 1e-12);
}

namespace {

constexpr double kWeightFloor = 1e-12;

// ln(1 + e^m) - y*m without overflow.
double nll_term(double margin, int y) {
    double soft = margin > 0 ? margin + std::log1p(std::exp(-margin))
                             : std::log1p(std::exp(margin));
    return soft - static_cast<double>(y) * margin;
}

struct Problem {
    const feat::FeatureMatrix& x;
    const std::vector<int>& y;
    std::vector<double> weights;  // normalized to sum 1
    double prevalence = 0.5;      // weighted positive fraction

    Problem(const feat::FeatureMatrix& x_in, const std::vector<int>& y_in,
            const std::vector<double>& sample_weights)
        : x(x_in), y(y_in) {
        if (x.rows.size() != y.size())
            throw InvariantError("train_lr: row count " + std::to_string(x.rows.size()) +
                                 " != label count " + std::to_string(y.size()));
        if (y.empty()) throw ConfigError("train_lr: empty training set");
        if (!sample_weights.empty() && sample_weights.size() != y.size())
            throw InvariantError("train_lr: sample_weights length mismatch");
        int64_t pos = 0;
        for (int label : y) {
            if (label != 0 && label != 1) throw ConfigError("train_lr: labels must be 0/1");
            pos += label;
        }
        if (pos == 0 || pos == static_cast<int64_t>(y.size()))
            throw ConfigError("train_lr: single-class training set (" + std::to_string(pos) +
                              " of " + std::to_string(y.size()) + " positive)");
        for (const feat::SparseVector& row : x.rows) {
            if (row.dim != x.dim) throw InvariantError("train_lr: inconsistent row dimension");
            for (const auto& [i, v] : row.entries)
                if (!std::isfinite(v)) throw ConfigError("train_lr: non-finite feature value");
        }
        weights.assign(y.size(), 1.0);
        if (!sample_weights.empty()) weights = sample_weights;
        double total = 0.0;
        for (double w : weights) {
            if (w < 0 || !std::isfinite(w)) throw ConfigError("train_lr: bad sample weight");
            total += w;
        }
        if (total <= 0) throw ConfigError("train_lr: sample weights sum to zero");
        double wpos = 0.0;
        for (size_t i = 0; i < y.size(); ++i)
            if (y[i] == 1) wpos += weights[i];
        for (double& w : weights) w /= total;
        prevalence = std::clamp(wpos / total, kWeightFloor, 1.0 - kWeightFloor);
    }

    double smooth_loss(const std::vector<double>& w, double b) const {
        double loss = 0.0;
        for (size_t i = 0; i < y.size(); ++i)
            loss += weights[i] * nll_term(x.rows[i].dot(w) + b, y[i]);
        return loss;
    }

    void smooth_grad(const std::vector<double>& w, double b, std::vector<double>& gw,
                     double& gb) const {
        gw.assign(w.size(), 0.0);
        gb = 0.0;
        for (size_t i = 0; i < y.size(); ++i) {
            double resid = weights[i] * (sigmoid(x.rows[i].dot(w) + b) - static_cast<double>(y[i]));
            for (const auto& [j, v] : x.rows[i].entries) gw[static_cast<size_t>(j)] += resid * v;
            gb += resid;
        }
    }
};

double penalty_term(const std::vector<double>& w, Penalty penalty, double lambda) {
    double p = 0.0;
    if (penalty == Penalty::l1)
        for (double wj : w) p += std::abs(wj);
    else if (penalty == Penalty::l2)
        for (double wj : w) p += 0.5 * wj * wj;
    return lambda * p;
}

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

}  // namespace

double lr_objective(const feat::FeatureMatrix& x, const std::vector<int>& y,
                    const std::vector<double>& sample_weights, const std::vector<double>& w,
                    double b, Penalty penalty, double lambda) {
    Problem prob(x, y, sample_weights);
    return prob.smooth_loss(w, b) + penalty_term(w, penalty, lambda);
}

void lr_gradient(const feat::FeatureMatrix& x, const std::vector<int>& y,
                 const std::vector<double>& sample_weights, const std::vector<double>& w, double b,
                 std::vector<double>& grad_w, double& grad_b) {
    Problem prob(x, y, sample_weights);
    prob.smooth_grad(w, b, grad_w, grad_b);
}

double l1_lambda_max(const feat::FeatureMatrix& x, const std::vector<int>& y,
                     const std::vector<double>& sample_weights) {
    Problem prob(x, y, sample_weights);
    std::vector<double> w(static_cast<size_t>(x.dim), 0.0), gw;
    double gb = 0.0;
    prob.smooth_grad(w, std::log(prob.prevalence / (1.0 - prob.prevalence)), gw, gb);
    double mx = 0.0;
    for (double g : gw) mx = std::max(mx, std::abs(g));
    return mx;
}

LinearModel train_lr(const feat::FeatureMatrix& x, const std::vector<int>& y, Penalty penalty,
                     double lambda, const std::vector<double>& sample_weights,
                     const TrainOptions& opts) {
    if (lambda < 0) throw ConfigError("train_lr: lambda must be non-negative");
    Problem prob(x, y, sample_weights);

    LinearModel model;
    model.penalty = penalty;
    model.lambda = lambda;
    model.w.assign(static_cast<size_t>(x.dim), 0.0);
    model.b = std::log(prob.prevalence / (1.0 - prob.prevalence));

    const bool is_l1 = penalty == Penalty::l1;
    double objective = prob.smooth_loss(model.w, model.b) +
                       penalty_term(model.w, penalty, lambda);
    std::vector<double> gw, trial_w(model.w.size());
    double gb = 0.0;
    double step = 1.0;

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        prob.smooth_grad(model.w, model.b, gw, gb);
        if (penalty == Penalty::l2)
            for (size_t j = 0; j < gw.size(); ++j) gw[j] += lambda * model.w[j];

        double smooth_here = objective - penalty_term(model.w, penalty, lambda);
        double trial_obj = 0.0, trial_b = model.b;
        bool accepted = false;
        step = std::min(step * 2.0, 1e6);
        for (int bt = 0; bt < 60; ++bt) {
            trial_b = model.b - step * gb;
            if (is_l1) {
                // ISTA step with the standard quadratic upper-bound test.
                double quad = 0.0, lin = 0.0;
                for (size_t j = 0; j < gw.size(); ++j) {
                    trial_w[j] = soft_threshold(model.w[j] - step * gw[j], step * lambda);
                    double dj = trial_w[j] - model.w[j];
                    lin += gw[j] * dj;
                    quad += dj * dj;
                }
                double db = trial_b - model.b;
                lin += gb * db;
                quad += db * db;
                double smooth_trial = prob.smooth_loss(trial_w, trial_b);
                if (smooth_trial <= smooth_here + lin + quad / (2.0 * step) + 1e-15) {
                    trial_obj = smooth_trial + penalty_term(trial_w, penalty, lambda);
                    accepted = true;
                    break;
                }
            } else {
                double gnorm2 = gb * gb;
                for (size_t j = 0; j < gw.size(); ++j) {
                    trial_w[j] = model.w[j] - step * gw[j];
                    gnorm2 += gw[j] * gw[j];
                }
                trial_obj = prob.smooth_loss(trial_w, trial_b) +
                            penalty_term(trial_w, penalty, lambda);
                if (trial_obj <= objective - 1e-4 * step * gnorm2) {
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) {
            // Line search exhausted: no descent direction at floating-point
            // resolution, treat as converged.
            model.converged = true;
            model.iterations = iter;
            break;
        }
        model.w = trial_w;
        model.b = trial_b;
        model.iterations = iter + 1;
        double decrease = objective - trial_obj;
        objective = trial_obj;
        if (decrease < opts.tol) {
            model.converged = true;
            break;
        }
    }
    model.final_objective = objective;
    return model;
}

std::vector<double> predict(const LinearModel& model, const feat::FeatureMatrix& x) {
    if (x.dim != static_cast<int32_t>(model.w.size()))
        throw InvariantError("predict: feature dimension " + std::to_string(x.dim) +
                             " != model dimension " + std::to_string(model.w.size()));
    std::vector<double> probs;
    probs.reserve(x.rows.size());
    for (const feat::SparseVector& row : x.rows) probs.push_back(sigmoid(row.dot(model.w) + model.b));
    return probs;
}

}  // namespace wb::model
