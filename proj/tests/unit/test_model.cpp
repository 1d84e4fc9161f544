#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "windowbench/error.hpp"
#include "windowbench/eval/auroc.hpp"
#include "windowbench/feat/sparse.hpp"
#include "windowbench/model/grad_check.hpp"
#include "windowbench/model/linear.hpp"
#include "windowbench/model/multitask.hpp"
#include "windowbench/model/neural.hpp"
#include "windowbench/model/rebalance.hpp"
#include "windowbench/model/serialize.hpp"
#include "windowbench/rng.hpp"

using namespace wb;
namespace fs = std::filesystem;

namespace {

// n examples around +/- offset on `dim` coordinates; label = sign cluster.
void make_blobs(Rng& rng, int n_per_class, int32_t dim, double offset,
                feat::FeatureMatrix& x, std::vector<int>& y) {
    x.dim = dim;
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < n_per_class; ++i) {
            std::vector<std::pair<int32_t, double>> entries;
            for (int32_t j = 0; j < dim; ++j) {
                double center = (c == 1 ? offset : -offset) * (j == 0 ? 1.0 : 0.3);
                entries.emplace_back(j, center + rng.normal(0.0, 1.0));
            }
            x.rows.push_back(feat::make_sparse(dim, std::move(entries)));
            y.push_back(c);
        }
}

}  // namespace

TEST_CASE("train_lr separates linearly separable data") {
    feat::FeatureMatrix x;
    std::vector<int> y;
    Rng rng(1);
    make_blobs(rng, 40, 3, 3.0, x, y);
    model::LinearModel m = model::train_lr(x, y, model::Penalty::l2, 1e-4);
    CHECK(m.converged);
    std::vector<double> p = model::predict(m, x);
    CHECK(eval::auroc(p, y) > 0.99);
    for (double v : p) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("predict matches the hand-evaluated sigmoid") {
    model::LinearModel m;
    m.w = {2.0, -1.0};
    m.b = 0.5;
    feat::FeatureMatrix x;
    x.dim = 2;
    x.rows.push_back(feat::make_sparse(2, {{0, 1.0}, {1, 3.0}}));
    x.rows.push_back(feat::make_sparse(2, {}));
    std::vector<double> p = model::predict(m, x);
    CHECK(p[0] == doctest::Approx(1.0 / (1.0 + std::exp(0.5))).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(1.0 / (1.0 + std::exp(-0.5))).epsilon(1e-12));
}

TEST_CASE("l1 at lambda_max zeroes every weight; below it does not") {
    feat::FeatureMatrix x;
    std::vector<int> y;
    Rng rng(2);
    make_blobs(rng, 30, 4, 1.5, x, y);
    double lmax = model::l1_lambda_max(x, y);
    CHECK(lmax > 0);
    model::LinearModel at = model::train_lr(x, y, model::Penalty::l1, lmax * 1.0001);
    for (double w : at.w) CHECK(w == 0.0);
    model::LinearModel below = model::train_lr(x, y, model::Penalty::l1, lmax * 0.5);
    double total = 0;
    for (double w : below.w) total += std::abs(w);
    CHECK(total > 0);
}

TEST_CASE("lr gradient agrees with central differences") {
    feat::FeatureMatrix x;
    std::vector<int> y;
    Rng rng(3);
    make_blobs(rng, 15, 3, 1.0, x, y);
    std::vector<double> w = {0.3, -0.2, 0.1};
    double b = -0.4;
    std::vector<double> gw;
    double gb;
    model::lr_gradient(x, y, {}, w, b, gw, gb);
    std::vector<double> analytic = gw;
    analytic.push_back(gb);
    std::vector<double> at = w;
    at.push_back(b);
    auto f = [&](const std::vector<double>& params) {
        std::vector<double> pw(params.begin(), params.end() - 1);
        return model::lr_objective(x, y, {}, pw, params.back(), model::Penalty::none, 0.0);
    };
    model::GradCheckResult r = model::grad_check(f, at, analytic);
    CHECK(r.max_rel_err < 1e-5);
}

TEST_CASE("grad_check flags a corrupted gradient") {
    feat::FeatureMatrix x;
    std::vector<int> y;
    Rng rng(4);
    make_blobs(rng, 15, 3, 1.0, x, y);
    std::vector<double> w = {0.3, -0.2, 0.1};
    std::vector<double> gw;
    double gb;
    model::lr_gradient(x, y, {}, w, 0.2, gw, gb);
    gw[1] = gw[1] * 1.5 + 0.05;  // deliberate corruption
    std::vector<double> analytic = gw;
    analytic.push_back(gb);
    std::vector<double> at = w;
    at.push_back(0.2);
    auto f = [&](const std::vector<double>& params) {
        std::vector<double> pw(params.begin(), params.end() - 1);
        return model::lr_objective(x, y, {}, pw, params.back(), model::Penalty::none, 0.0);
    };
    model::GradCheckResult r = model::grad_check(f, at, analytic);
    CHECK(r.max_rel_err > 1e-3);
    CHECK(r.worst_index == 1);
}

TEST_CASE("train_lr rejects degenerate inputs") {
    feat::FeatureMatrix x;
    x.dim = 1;
    x.rows.push_back(feat::make_sparse(1, {{0, 1.0}}));
    x.rows.push_back(feat::make_sparse(1, {{0, 2.0}}));
    CHECK_THROWS_AS(model::train_lr(x, {1, 1}, model::Penalty::l2, 0.1), ConfigError);
    CHECK_THROWS_AS(model::train_lr(x, {}, model::Penalty::l2, 0.1), InvariantError);
    CHECK_THROWS_AS(model::train_lr(x, {0, 2}, model::Penalty::l2, 0.1), ConfigError);
    CHECK_THROWS_AS(model::train_lr(x, {0, 1}, model::Penalty::l2, -1.0), ConfigError);
}

TEST_CASE("weighted objective equals the duplicated-row objective") {
    feat::FeatureMatrix x;
    x.dim = 2;
    x.rows.push_back(feat::make_sparse(2, {{0, 1.0}}));
    x.rows.push_back(feat::make_sparse(2, {{1, -2.0}}));
    x.rows.push_back(feat::make_sparse(2, {{0, 0.5}, {1, 0.5}}));
    std::vector<int> y = {1, 0, 1};

    feat::FeatureMatrix xdup;
    xdup.dim = 2;
    xdup.rows = {x.rows[0], x.rows[0], x.rows[1], x.rows[2]};
    std::vector<int> ydup = {1, 1, 0, 1};

    std::vector<double> w = {0.7, -0.3};
    double obj_weighted =
        model::lr_objective(x, y, {2.0, 1.0, 1.0}, w, 0.1, model::Penalty::none, 0.0);
    double obj_dup = model::lr_objective(xdup, ydup, {}, w, 0.1, model::Penalty::none, 0.0);
    CHECK(obj_weighted == doctest::Approx(obj_dup).epsilon(1e-12));
}

TEST_CASE("rebalance plans: identities, class weights, resampling") {
    std::vector<int> y = {1, 0, 0, 0, 0, 1, 0, 0};  // 2 pos, 6 neg

    model::RebalancePlan none = model::make_rebalance_plan(y, model::ImbalanceStrategy::none, 1);
    REQUIRE(none.keep.size() == 8);
    for (int32_t i = 0; i < 8; ++i) CHECK(none.keep[static_cast<size_t>(i)] == i);
    for (double w : none.weights) CHECK(w == 1.0);

    model::RebalancePlan cw =
        model::make_rebalance_plan(y, model::ImbalanceStrategy::class_weights, 1);
    REQUIRE(cw.keep.size() == 8);
    for (size_t i = 0; i < 8; ++i)
        CHECK(cw.weights[i] == doctest::Approx(y[i] == 1 ? 8.0 / 4.0 : 8.0 / 12.0));

    model::RebalancePlan over =
        model::make_rebalance_plan(y, model::ImbalanceStrategy::oversample, 7);
    int pos = 0, neg = 0;
    for (int32_t k : over.keep) (y[static_cast<size_t>(k)] == 1 ? pos : neg)++;
    CHECK(pos == neg);
    CHECK(neg == 6);
    // The first 8 entries are the originals.
    for (int32_t i = 0; i < 8; ++i) CHECK(over.keep[static_cast<size_t>(i)] == i);
    for (size_t i = 8; i < over.keep.size(); ++i) CHECK(y[static_cast<size_t>(over.keep[i])] == 1);

    model::RebalancePlan under =
        model::make_rebalance_plan(y, model::ImbalanceStrategy::undersample, 7);
    pos = neg = 0;
    for (int32_t k : under.keep) (y[static_cast<size_t>(k)] == 1 ? pos : neg)++;
    CHECK(pos == 2);
    CHECK(neg == 2);
    CHECK(std::is_sorted(under.keep.begin(), under.keep.end()));

    // Determinism in seed.
    model::RebalancePlan under2 =
        model::make_rebalance_plan(y, model::ImbalanceStrategy::undersample, 7);
    CHECK(under.keep == under2.keep);
}

TEST_CASE("apply_rebalance materializes the plan in order") {
    feat::FeatureMatrix x;
    x.dim = 1;
    for (int i = 0; i < 4; ++i)
        x.rows.push_back(feat::make_sparse(1, {{0, static_cast<double>(i)}}));
    std::vector<int> y = {1, 0, 0, 0};
    model::RebalancePlan plan;
    plan.strategy = model::ImbalanceStrategy::oversample;
    plan.keep = {0, 1, 2, 3, 0, 0};
    plan.weights.assign(6, 1.0);
    model::RebalancedSet set = model::apply_rebalance(x, y, plan);
    REQUIRE(set.x.rows.size() == 6);
    CHECK(set.x.rows[4].value_at(0) == 0.0);
    CHECK(set.y[4] == 1);
    CHECK(set.y[1] == 0);
}

TEST_CASE("identical tasks collapse to one l2 model at the split-penalty lambda") {
    // With the two tasks sharing one dataset the unique optimum is symmetric:
    // u = w_shared + w_task minimizes 2*meanNLL(u) + min-split of the
    // penalties, and the split identity gives an exact pooled-l2 twin with
    //   lambda_lr = 2*ls*lt/(ls + 2*lt),  w_shared = 2*lt/(ls + 2*lt) * u.
    // As lambda_task grows the twin's lambda tends to lambda_shared: the
    // tasks are forced onto the shared weights.
    feat::FeatureMatrix x;
    std::vector<int> y;
    Rng rng(5);
    make_blobs(rng, 40, 3, 1.2, x, y);
    std::vector<model::TaskData> tasks(2);
    tasks[0] = {"hip", x, y, {}};
    tasks[1] = {"knee", x, y, {}};
    for (double lt : {0.3, 3.0}) {
        CAPTURE(lt);
        const double ls = 0.1;
        model::MultitaskModel mt = model::train_multitask(tasks, ls, lt, {1e-13, 30000});
        double lambda_lr = 2 * ls * lt / (ls + 2 * lt);
        model::LinearModel lr =
            model::train_lr(x, y, model::Penalty::l2, lambda_lr, {}, {1e-13, 30000});
        double share = 2 * lt / (ls + 2 * lt);
        for (size_t t = 0; t < 2; ++t) {
            CHECK(std::abs(mt.b[t] - lr.b) < 5e-3);
            for (size_t j = 0; j < 3; ++j) {
                double u = mt.w_shared[j] + mt.w_task[t][j];
                CHECK(std::abs(u - lr.w[j]) < 5e-3);
                CHECK(std::abs(mt.w_shared[j] - share * u) < 5e-3);
            }
        }
    }
}

TEST_CASE("disjoint-support tasks reduce to independent l2 models") {
    // Task 0 only populates coordinates 0-1, task 1 only 2-3, so each block's
    // objective decouples into meanNLL_t(u_t) plus the shared/task penalty
    // split, whose exact one-task twin is l2 with 2*ls*lt/(ls+lt). As
    // lambda_shared grows that tends to 2*lambda_task: independent models.
    Rng rng(6);
    auto embed = [](const feat::FeatureMatrix& in, int32_t offset) {
        feat::FeatureMatrix out;
        out.dim = 4;
        for (const feat::SparseVector& row : in.rows) {
            std::vector<std::pair<int32_t, double>> entries;
            for (const auto& [j, v] : row.entries) entries.emplace_back(j + offset, v);
            out.rows.push_back(feat::make_sparse(4, std::move(entries)));
        }
        return out;
    };
    feat::FeatureMatrix x0, x1;
    std::vector<int> y0, y1;
    make_blobs(rng, 35, 2, 1.0, x0, y0);
    make_blobs(rng, 35, 2, 2.0, x1, y1);
    std::vector<model::TaskData> tasks(2);
    tasks[0] = {"hip", embed(x0, 0), y0, {}};
    tasks[1] = {"knee", embed(x1, 2), y1, {}};
    const double ls = 0.4, lt = 0.1;
    model::MultitaskModel mt = model::train_multitask(tasks, ls, lt, {1e-13, 30000});
    double lambda_lr = 2 * ls * lt / (ls + lt);
    model::LinearModel lr0 =
        model::train_lr(tasks[0].x, y0, model::Penalty::l2, lambda_lr, {}, {1e-13, 30000});
    model::LinearModel lr1 =
        model::train_lr(tasks[1].x, y1, model::Penalty::l2, lambda_lr, {}, {1e-13, 30000});
    for (size_t j = 0; j < 2; ++j) {
        CHECK(std::abs(mt.w_shared[j] + mt.w_task[0][j] - lr0.w[j]) < 5e-3);
        CHECK(std::abs(mt.w_shared[j + 2] + mt.w_task[1][j + 2] - lr1.w[j + 2]) < 5e-3);
        // Off-block task weights carry no data and collapse to zero.
        CHECK(std::abs(mt.w_task[0][j + 2]) < 1e-6);
        CHECK(std::abs(mt.w_task[1][j]) < 1e-6);
    }
    CHECK(std::abs(mt.b[0] - lr0.b) < 5e-3);
    CHECK(std::abs(mt.b[1] - lr1.b) < 5e-3);
}

TEST_CASE("multitask gradient agrees with central differences") {
    Rng rng(7);
    std::vector<model::TaskData> tasks(2);
    feat::FeatureMatrix x0, x1;
    std::vector<int> y0, y1;
    make_blobs(rng, 10, 2, 1.0, x0, y0);
    make_blobs(rng, 12, 2, 1.0, x1, y1);
    tasks[0] = {"a", x0, y0, {}};
    tasks[1] = {"b", x1, y1, {}};
    // Stack [w_shared(2) | w_task0(2) | w_task1(2) | b0 b1].
    std::vector<double> params = {0.2, -0.1, 0.05, 0.3, -0.2, 0.15, 0.4, -0.3};
    std::vector<double> analytic = model::multitask_gradient(tasks, 0.3, 0.7, params);
    auto f = [&](const std::vector<double>& p) {
        return model::multitask_objective(tasks, 0.3, 0.7, p);
    };
    model::GradCheckResult r = model::grad_check(f, params, analytic);
    CHECK(r.max_rel_err < 1e-5);
}

TEST_CASE("multitask rejects empty input and mismatched dims") {
    CHECK_THROWS_AS(model::train_multitask({}, 0.1, 0.1), ConfigError);
    feat::FeatureMatrix x;
    x.dim = 2;
    x.rows.push_back(feat::make_sparse(2, {{0, 1.0}}));
    std::vector<model::TaskData> tasks = {{"a", x, {1}, {}}};
    CHECK_THROWS_AS(model::train_multitask(tasks, 0.1, 0.1), ConfigError);  // single class
}

namespace {

// Deterministic small model with pre-activations kept away from ReLU kinks.
model::NeuralModel hand_model(model::Aggregation agg, uint64_t seed) {
    model::NeuralModel m;
    m.dims = {3, 4, 2};
    m.agg = agg;
    m.vocab_size = 5;
    Rng rng(seed);
    auto fill = [&](std::vector<double>& v, size_t n) {
        v.resize(n);
        for (double& x : v) x = rng.uniform01() * 0.8 - 0.4;
    };
    fill(m.E, 5 * 3);
    fill(m.Wp, 4 * 3);
    fill(m.bp, 4);
    for (double& b : m.bp) b += (b >= 0 ? 0.15 : -0.15);  // clear of the kink
    if (agg == model::Aggregation::attention) {
        fill(m.Wa, 2 * 4);
        fill(m.ba, 2);
        fill(m.v, 2);
    }
    m.head_w.resize(1);
    fill(m.head_w[0], 4);
    m.head_b = {0.1};
    m.task_names = {"t"};
    return m;
}

model::SeqExamples toy_batch() {
    model::SeqExamples b;
    b.docs = {{0, 2, 4}, {1, 3}, {4, 0}};
    b.y = {1, 0, 1};
    return b;
}

}  // namespace

TEST_CASE("neural gradient agrees with central differences for every aggregation") {
    for (model::Aggregation agg :
         {model::Aggregation::mean, model::Aggregation::maxpool, model::Aggregation::attention}) {
        CAPTURE(static_cast<int>(agg));
        model::NeuralModel m = hand_model(agg, 11 + static_cast<uint64_t>(agg));
        model::SeqExamples batch = toy_batch();
        std::vector<double> analytic = model::neural_batch_gradient(m, 0, batch);
        std::vector<double> at = model::get_params(m);
        REQUIRE(analytic.size() == at.size());
        model::NeuralModel probe = m;
        auto f = [&](const std::vector<double>& p) {
            model::set_params(probe, p);
            return model::neural_batch_loss(probe, 0, batch);
        };
        model::GradCheckResult r = model::grad_check(f, at, analytic, 1e-5);
        CHECK(r.max_rel_err < 1e-4);
    }
}

TEST_CASE("zeroed network predicts sigmoid of the head bias, empty docs included") {
    model::NeuralModel m = hand_model(model::Aggregation::mean, 13);
    std::fill(m.E.begin(), m.E.end(), 0.0);
    std::fill(m.Wp.begin(), m.Wp.end(), 0.0);
    std::fill(m.bp.begin(), m.bp.end(), 0.0);
    std::fill(m.head_w[0].begin(), m.head_w[0].end(), 0.0);
    m.head_b = {0.3};
    std::vector<std::vector<int32_t>> docs = {{0, 1, 2}, {}, {4}};
    std::vector<double> p = model::predict_neural(m, 0, docs);
    for (double v : p) CHECK(v == doctest::Approx(model::sigmoid(0.3)).epsilon(1e-12));
}

TEST_CASE("attention with zero scorer equals mean aggregation") {
    model::NeuralModel mean_model = hand_model(model::Aggregation::mean, 17);
    model::NeuralModel attn_model = mean_model;
    attn_model.agg = model::Aggregation::attention;
    attn_model.Wa.assign(2 * 4, 0.37);
    attn_model.ba.assign(2, -0.2);
    attn_model.v.assign(2, 0.0);  // all scores zero -> uniform alpha -> mean
    std::vector<std::vector<int32_t>> docs = {{0, 1, 2, 3}, {2, 2, 4}, {1}};
    std::vector<double> pm = model::predict_neural(mean_model, 0, docs);
    std::vector<double> pa = model::predict_neural(attn_model, 0, docs);
    for (size_t i = 0; i < docs.size(); ++i) CHECK(pm[i] == doctest::Approx(pa[i]).epsilon(1e-12));
}

TEST_CASE("train_neural learns a separable token rule") {
    model::NeuralTask task;
    task.name = "toy";
    Rng rng(19);
    for (int i = 0; i < 60; ++i) {
        bool positive = i % 2 == 0;
        std::vector<int32_t> doc;
        for (int t = 0; t < 6; ++t)
            doc.push_back(positive ? 0 : 1);
        doc.push_back(static_cast<int32_t>(rng.uniform_int(2, 4)));  // noise token
        task.train.docs.push_back(std::move(doc));
        task.train.y.push_back(positive ? 1 : 0);
    }
    model::NeuralOptions opts;
    opts.dims = {8, 8, 4};
    opts.agg = model::Aggregation::mean;
    opts.lr = 0.1;
    opts.batch_size = 10;
    opts.max_epochs = 30;
    opts.seed = 5;
    model::NeuralModel m = model::train_neural({task}, 5, opts);
    std::vector<double> p = model::predict_neural(m, 0, task.train.docs);
    CHECK(eval::auroc(p, task.train.y) > 0.95);

    // The single-task convenience entry is the same computation.
    model::NeuralModel m2 = model::train_avg_encoder(task, 5, opts);
    std::vector<double> p2 = model::predict_neural(m2, 0, task.train.docs);
    for (size_t i = 0; i < p.size(); ++i) CHECK(p[i] == doctest::Approx(p2[i]).epsilon(1e-12));
}

TEST_CASE("pretrained embedding rows overwrite the random initialization") {
    model::NeuralTask task;
    task.name = "toy";
    task.train.docs = {{0, 1}, {1, 2}, {0, 2}, {2}};
    task.train.y = {1, 0, 1, 0};
    model::EmbeddingSeed seed_rows;
    seed_rows.rows[1] = {9.0, -9.0, 9.0, -9.0};
    model::NeuralOptions opts;
    opts.dims = {4, 4, 2};
    opts.max_epochs = 1;
    opts.lr = 1e-12;  // one sgd epoch that moves nothing measurable
    opts.pretrained = &seed_rows;
    model::NeuralModel m = model::train_neural({task}, 3, opts);
    CHECK(m.E[1 * 4 + 0] == doctest::Approx(9.0).epsilon(1e-9));
    CHECK(m.E[1 * 4 + 3] == doctest::Approx(-9.0).epsilon(1e-9));
    CHECK(std::abs(m.E[0]) < 1.0);  // untouched rows keep the small random init

    model::EmbeddingSeed bad;
    bad.rows[7] = {1, 1, 1, 1};  // out of vocabulary range
    opts.pretrained = &bad;
    CHECK_THROWS_AS(model::train_neural({task}, 3, opts), ConfigError);
    model::EmbeddingSeed narrow;
    narrow.rows[0] = {1.0};  // wrong width
    opts.pretrained = &narrow;
    CHECK_THROWS_AS(model::train_neural({task}, 3, opts), ConfigError);
}

TEST_CASE("embedding tsv loader maps tokens, skips unknowns, reports bad lines") {
    fs::path path = fs::temp_directory_path() / "wb_emb_test.tsv";
    std::ofstream(path) << "alpha\t0.1\t0.2\t0.3\n"
                        << "ghost\t1\t1\t1\n"
                        << "beta\t1\t2\t3\n"
                        << "beta\t4\t5\t6\n";
    auto lookup = [](std::string_view token) -> int32_t {
        if (token == "alpha") return 0;
        if (token == "beta") return 1;
        return -1;
    };
    model::EmbeddingSeed seed = model::load_embedding_tsv(path, lookup, 3);
    REQUIRE(seed.rows.size() == 2);
    CHECK(seed.rows.at(0)[1] == doctest::Approx(0.2));
    CHECK(seed.rows.at(1)[0] == doctest::Approx(4.0));  // last duplicate wins

    std::ofstream(path) << "alpha\t0.1\t0.2\n";  // wrong field count
    CHECK_THROWS_AS(model::load_embedding_tsv(path, lookup, 3), ConfigError);
    std::ofstream(path) << "alpha\tx\t0.2\t0.3\n";  // non-numeric
    CHECK_THROWS_AS(model::load_embedding_tsv(path, lookup, 3), ConfigError);
    std::ofstream(path) << "alpha\tinf\t0.2\t0.3\n";  // non-finite
    CHECK_THROWS_AS(model::load_embedding_tsv(path, lookup, 3), ConfigError);
    std::ofstream(path) << "alpha\t1\t2\t3\n";
    try {
        std::ofstream(path) << "alpha\t1\t2\t3\nbeta\tbad\t2\t3\n";
        model::load_embedding_tsv(path, lookup, 3);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
    fs::remove(path);
}

TEST_CASE("model bundles round-trip through json and verify the vocab hash") {
    fs::path dir = fs::temp_directory_path() / "wb_model_io";
    fs::create_directories(dir);

    {
        model::ModelBundle b;
        b.kind = "linear";
        model::LinearModel lm;
        lm.w = {0.25, -1.5, 3.75};
        lm.b = 0.125;
        lm.penalty = model::Penalty::l1;
        lm.lambda = 0.01;
        lm.converged = true;
        lm.iterations = 42;
        b.linear = lm;
        b.vocab_hash = "cafe1234";
        b.seed = 99;
        std::string path = (dir / "linear.json").string();
        model::save_model(path, b);
        model::ModelBundle r = model::load_model(path, "cafe1234");
        REQUIRE(r.linear.has_value());
        CHECK(r.kind == "linear");
        CHECK(r.linear->w == lm.w);
        CHECK(r.linear->b == lm.b);
        CHECK(r.linear->penalty == model::Penalty::l1);
        CHECK(r.linear->converged);
        CHECK(r.seed == 99);
        CHECK_THROWS_AS(model::load_model(path, "deadbeef"), ConfigError);
        CHECK_NOTHROW(model::load_model(path));  // no expectation, no check
    }
    {
        model::ModelBundle b;
        b.kind = "multitask_linear";
        model::MultitaskModel mm;
        mm.w_shared = {0.5, -0.5};
        mm.w_task = {{0.1, 0.2}, {-0.1, -0.2}};
        mm.b = {0.3, -0.3};
        mm.task_names = {"hip", "knee"};
        mm.converged = true;
        b.multitask = mm;
        b.vocab_hash = "beef";
        std::string path = (dir / "mt.json").string();
        model::save_model(path, b);
        model::ModelBundle r = model::load_model(path, "beef");
        REQUIRE(r.multitask.has_value());
        CHECK(r.multitask->w_shared == mm.w_shared);
        CHECK(r.multitask->w_task == mm.w_task);
        CHECK(r.multitask->task_names == mm.task_names);
    }
    {
        model::ModelBundle b;
        b.kind = "neural";
        b.neural = hand_model(model::Aggregation::attention, 23);
        b.vocab_hash = "f00d";
        std::string path = (dir / "neural.json").string();
        model::save_model(path, b);
        model::ModelBundle r = model::load_model(path, "f00d");
        REQUIRE(r.neural.has_value());
        CHECK(r.neural->E == b.neural->E);
        CHECK(r.neural->Wa == b.neural->Wa);
        CHECK(r.neural->head_w == b.neural->head_w);
        CHECK(r.neural->agg == model::Aggregation::attention);
        CHECK(r.neural->vocab_size == 5);
    }
    fs::remove_all(dir);
}
