#include "windowbench/model/serialize.hpp"

#include <fstream>

#include <json.hpp>

#include "windowbench/error.hpp"

namespace wb::model {

using nlohmann::ordered_json;

namespace {

ordered_json linear_to_json(const LinearModel& m) {
    ordered_json j;
    j["penalty"] = std::string(to_string(m.penalty));
    j["lambda"] = m.lambda;
    j["b"] = m.b;
    j["w"] = m.w;
    j["iterations"] = m.iterations;
    j["final_objective"] = m.final_objective;
    j["converged"] = m.converged;
    return j;
}

LinearModel linear_from_json(const ordered_json& j) {
    LinearModel m;
    m.penalty = parse_penalty(j.at("penalty").get<std::string>());
    m.lambda = j.at("lambda").get<double>();
    m.b = j.at("b").get<double>();
    m.w = j.at("w").get<std::vector<double>>();
    m.iterations = j.at("iterations").get<int>();
    m.final_objective = j.at("final_objective").get<double>();
    m.converged = j.at("converged").get<bool>();
    return m;
}

ordered_json multitask_to_json(const MultitaskModel& m) {
    ordered_json j;
    j["task_names"] = m.task_names;
    j["lambda_shared"] = m.lambda_shared;
    j["lambda_task"] = m.lambda_task;
    j["w_shared"] = m.w_shared;
    j["w_task"] = m.w_task;
    j["b"] = m.b;
    j["iterations"] = m.iterations;
    j["final_objective"] = m.final_objective;
    j["converged"] = m.converged;
    return j;
}

MultitaskModel multitask_from_json(const ordered_json& j) {
    MultitaskModel m;
    m.task_names = j.at("task_names").get<std::vector<std::string>>();
    m.lambda_shared = j.at("lambda_shared").get<double>();
    m.lambda_task = j.at("lambda_task").get<double>();
    m.w_shared = j.at("w_shared").get<std::vector<double>>();
    m.w_task = j.at("w_task").get<std::vector<std::vector<double>>>();
    m.b = j.at("b").get<std::vector<double>>();
    m.iterations = j.at("iterations").get<int>();
    m.final_objective = j.at("final_objective").get<double>();
    m.converged = j.at("converged").get<bool>();
    return m;
}

ordered_json neural_to_json(const NeuralModel& m) {
    ordered_json j;
    j["dims"] = {{"emb", m.dims.emb}, {"hidden", m.dims.hidden}, {"attn", m.dims.attn}};
    j["aggregation"] = std::string(to_string(m.agg));
    j["vocab_size"] = m.vocab_size;
    j["task_names"] = m.task_names;
    j["E"] = m.E;
    j["Wp"] = m.Wp;
    j["bp"] = m.bp;
    j["Wa"] = m.Wa;
    j["ba"] = m.ba;
    j["v"] = m.v;
    j["head_w"] = m.head_w;
    j["head_b"] = m.head_b;
    j["epochs_run"] = m.epochs_run;
    j["early_stopped"] = m.early_stopped;
    j["best_val_auroc"] = m.best_val_auroc;
    return j;
}

NeuralModel neural_from_json(const ordered_json& j) {
    NeuralModel m;
    m.dims.emb = j.at("dims").at("emb").get<int>();
    m.dims.hidden = j.at("dims").at("hidden").get<int>();
    m.dims.attn = j.at("dims").at("attn").get<int>();
    m.agg = parse_aggregation(j.at("aggregation").get<std::string>());
    m.vocab_size = j.at("vocab_size").get<int>();
    m.task_names = j.at("task_names").get<std::vector<std::string>>();
    m.E = j.at("E").get<std::vector<double>>();
    m.Wp = j.at("Wp").get<std::vector<double>>();
    m.bp = j.at("bp").get<std::vector<double>>();
    m.Wa = j.at("Wa").get<std::vector<double>>();
    m.ba = j.at("ba").get<std::vector<double>>();
    m.v = j.at("v").get<std::vector<double>>();
    m.head_w = j.at("head_w").get<std::vector<std::vector<double>>>();
    m.head_b = j.at("head_b").get<std::vector<double>>();
    m.epochs_run = j.at("epochs_run").get<int>();
    m.early_stopped = j.at("early_stopped").get<bool>();
    m.best_val_auroc = j.at("best_val_auroc").get<double>();
    return m;
}

}  // namespace

void save_model(const std::string& path, const ModelBundle& bundle) {
    ordered_json j;
    j["kind"] = bundle.kind;
    j["vocab_hash"] = bundle.vocab_hash;
    j["seed"] = bundle.seed;
    if (bundle.kind == "linear") {
        if (!bundle.linear) throw InvariantError("save_model: missing linear payload");
        j["model"] = linear_to_json(*bundle.linear);
    } else if (bundle.kind == "multitask_linear") {
        if (!bundle.multitask) throw InvariantError("save_model: missing multitask payload");
        j["model"] = multitask_to_json(*bundle.multitask);
    } else if (bundle.kind == "neural") {
        if (!bundle.neural) throw InvariantError("save_model: missing neural payload");
        j["model"] = neural_to_json(*bundle.neural);
    } else {
        throw InvariantError("save_model: unknown kind '" + bundle.kind + "'");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("save_model: cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw ConfigError("save_model: write failed for '" + path + "'");
}

ModelBundle load_model(const std::string& path, const std::string& expected_vocab_hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("load_model: cannot open '" + path + "'");
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("load_model: '" + path + "' is not valid JSON: " + e.what());
    }
    ModelBundle bundle;
    try {
        bundle.kind = j.at("kind").get<std::string>();
        bundle.vocab_hash = j.at("vocab_hash").get<std::string>();
        bundle.seed = j.at("seed").get<uint64_t>();
        if (bundle.kind == "linear")
            bundle.linear = linear_from_json(j.at("model"));
        else if (bundle.kind == "multitask_linear")
            bundle.multitask = multitask_from_json(j.at("model"));
        else if (bundle.kind == "neural")
            bundle.neural = neural_from_json(j.at("model"));
        else
            throw ConfigError("load_model: unknown kind '" + bundle.kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("load_model: '" + path + "' is missing fields: " + e.what());
    }
    if (!expected_vocab_hash.empty() && bundle.vocab_hash != expected_vocab_hash)
        throw ConfigError("load_model: vocabulary hash mismatch (model built against " +
                          bundle.vocab_hash + ", current " + expected_vocab_hash + ")");
    return bundle;
}

}  // namespace wb::model
