#include "splboost/model_io.hpp"

#include <fstream>

#include <json.hpp>

namespace splboost {

namespace {

using nlohmann::json;

json node_to_json(const TreeNode& node) {
    if (node.is_leaf()) return json{{"prediction", node.prediction}};
    return json{{"feature", node.feature},
                {"threshold", node.threshold},
                {"left", node.left},
                {"right", node.right}};
}

TreeNode node_from_json(const json& j) {
    TreeNode node;
    if (j.contains("feature")) {
        node.feature = j.at("feature").get<int>();
        node.threshold = j.at("threshold").get<double>();
        node.left = j.at("left").get<int>();
        node.right = j.at("right").get<int>();
        if (node.feature < 0) throw std::invalid_argument("model: bad split feature");
    } else {
        node.prediction = j.at("prediction").get<int>();
        if (node.prediction != 1 && node.prediction != -1)
            throw std::invalid_argument("model: leaf prediction must be +1 or -1");
    }
    return node;
}

}  // namespace

void save_model(const Ensemble& ensemble, std::ostream& out) {
    json stages = json::array();
    for (const Stage& stage : ensemble.stages) {
        json nodes = json::array();
        for (const TreeNode& node : stage.learner.nodes())
            nodes.push_back(node_to_json(node));
        stages.push_back(json{{"alpha", stage.alpha}, {"nodes", nodes}});
    }
    const json model{{"n_features", ensemble.n_features}, {"stages", stages}};
    out << model.dump(2) << '\n';
}

void save_model(const Ensemble& ensemble, const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    save_model(ensemble, file);
}

Ensemble load_model(std::istream& in) {
    json model = json::parse(in);
    Ensemble ensemble;
    ensemble.n_features = model.at("n_features").get<std::size_t>();
    for (const json& stage : model.at("stages")) {
        std::vector<TreeNode> nodes;
        for (const json& node : stage.at("nodes")) nodes.push_back(node_from_json(node));
        ensemble.stages.push_back(Stage{stage.at("alpha").get<double>(),
                                        WeakLearner(std::move(nodes), ensemble.n_features)});
    }
    return ensemble;
}

Ensemble load_model(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + path.string());
    return load_model(file);
}

}  // namespace splboost
