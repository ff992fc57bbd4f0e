#include "fogfair/model_io.hpp"

#include <fstream>
#include <string>

#include <json.hpp>

namespace fogfair {
namespace {

using nlohmann::json;

constexpr int kModelFormatVersion = 1;

json read_json_file(const std::filesystem::path& path, const char* expected_kind) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open model file: " + path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, "invalid JSON in " + path.string() + ": " + e.what());
  }
  if (doc.value("format_version", -1) != kModelFormatVersion) {
    throw Error(ErrorCode::IoError, "unsupported model format version in " + path.string());
  }
  if (doc.value("kind", std::string()) != expected_kind) {
    throw Error(ErrorCode::IoError,
                "expected kind '" + std::string(expected_kind) + "' in " + path.string());
  }
  return doc;
}

void write_json_file(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write model file: " + path.string());
  }
  out << doc.dump(2) << '\n';
  if (!out) {
    throw Error(ErrorCode::IoError, "short write to " + path.string());
  }
}

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv1D: return "conv1d";
    case LayerKind::ReLU: return "relu";
    case LayerKind::GlobalMeanPool: return "global_mean_pool";
    case LayerKind::Dense: return "dense";
  }
  throw Error(ErrorCode::IoError, "unknown layer kind");
}

LayerKind parse_layer_kind(const std::string& name) {
  if (name == "conv1d") return LayerKind::Conv1D;
  if (name == "relu") return LayerKind::ReLU;
  if (name == "global_mean_pool") return LayerKind::GlobalMeanPool;
  if (name == "dense") return LayerKind::Dense;
  throw Error(ErrorCode::IoError, "unknown layer kind: " + name);
}

}  // namespace

void save_forest(const ForestModel& model, const std::filesystem::path& path) {
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["kind"] = "forest";
  doc["n_features"] = model.n_features;
  doc["n_trees"] = model.config.n_trees;
  doc["max_features"] = model.config.max_features;
  doc["rng_seed"] = model.config.rng_seed;
  json trees = json::array();
  for (const DecisionTree& tree : model.trees) {
    json nodes = json::array();
    for (const TreeNode& node : tree.nodes) {
      json n;
      n["leaf"] = node.is_leaf();
      if (node.is_leaf()) {
        n["p"] = node.positive_fraction;
      } else {
        n["feature"] = node.feature;
        n["threshold"] = node.threshold;
        n["left"] = node.left;
        n["right"] = node.right;
      }
      nodes.push_back(std::move(n));
    }
    trees.push_back(std::move(nodes));
  }
  doc["trees"] = std::move(trees);
  write_json_file(doc, path);
}

ForestModel load_forest(const std::filesystem::path& path) {
  json doc = read_json_file(path, "forest");
  ForestModel model;
  try {
    model.n_features = doc.at("n_features").get<std::size_t>();
    model.config.n_trees = doc.at("n_trees").get<std::size_t>();
    model.config.max_features = doc.at("max_features").get<std::size_t>();
    model.config.rng_seed = doc.at("rng_seed").get<std::uint64_t>();
    for (const json& nodes : doc.at("trees")) {
      DecisionTree tree;
      for (const json& n : nodes) {
        TreeNode node;
        if (n.at("leaf").get<bool>()) {
          node.positive_fraction = n.at("p").get<double>();
        } else {
          node.feature = n.at("feature").get<std::size_t>();
          node.threshold = n.at("threshold").get<double>();
          node.left = n.at("left").get<std::size_t>();
          node.right = n.at("right").get<std::size_t>();
        }
        tree.nodes.push_back(node);
      }
      model.trees.push_back(std::move(tree));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, "malformed forest file " + path.string() + ": " + e.what());
  }
  return model;
}

void save_neural(const NeuralModel& model, const std::filesystem::path& path) {
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["kind"] = "neural";
  doc["input_channels"] = model.input_channels;
  doc["min_input_len"] = model.min_input_len;
  doc["init_seed"] = model.init_seed;
  json layers = json::array();
  for (const Layer& layer : model.layers) {
    json l;
    l["kind"] = layer_kind_name(layer.kind);
    l["kernel_size"] = layer.kernel_size;
    l["in_dim"] = layer.in_dim;
    l["out_dim"] = layer.out_dim;
    if (layer.has_params()) {
      l["weights"] = layer.weights.values;
      l["bias"] = layer.bias.values;
    }
    layers.push_back(std::move(l));
  }
  doc["layers"] = std::move(layers);
  write_json_file(doc, path);
}

NeuralModel load_neural(const std::filesystem::path& path) {
  json doc = read_json_file(path, "neural");
  NeuralModel model;
  try {
    model.input_channels = doc.at("input_channels").get<std::size_t>();
    model.min_input_len = doc.at("min_input_len").get<std::size_t>();
    model.init_seed = doc.at("init_seed").get<std::uint64_t>();
    for (const json& l : doc.at("layers")) {
      Layer layer;
      layer.kind = parse_layer_kind(l.at("kind").get<std::string>());
      layer.kernel_size = l.at("kernel_size").get<std::size_t>();
      layer.in_dim = l.at("in_dim").get<std::size_t>();
      layer.out_dim = l.at("out_dim").get<std::size_t>();
      if (layer.has_params()) {
        layer.weights = layer.kind == LayerKind::Conv1D
                            ? Tensor({layer.out_dim, layer.in_dim, layer.kernel_size})
                            : Tensor({layer.out_dim, layer.in_dim});
        layer.bias = Tensor({layer.out_dim});
        auto w = l.at("weights").get<std::vector<double>>();
        auto b = l.at("bias").get<std::vector<double>>();
        if (w.size() != layer.weights.size() || b.size() != layer.bias.size())
          throw Error(ErrorCode::IoError, "layer parameter size mismatch in " + path.string());
        layer.weights.values = std::move(w);
        layer.bias.values = std::move(b);
      }
      model.layers.push_back(std::move(layer));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, "malformed neural file " + path.string() + ": " + e.what());
  }
  return model;
}

void save_threshold_policy(const ThresholdPolicy& policy, const std::filesystem::path& path) {
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["kind"] = "threshold_policy";
  doc["t0"] = policy.t0;
  doc["t1"] = policy.t1;
  doc["criterion"] = fairness_criterion_name(policy.criterion);
  doc["achieved_disparity"] = policy.achieved_disparity;
  write_json_file(doc, path);
}

ThresholdPolicy load_threshold_policy(const std::filesystem::path& path) {
  json doc = read_json_file(path, "threshold_policy");
  ThresholdPolicy policy;
  try {
    policy.t0 = doc.at("t0").get<double>();
    policy.t1 = doc.at("t1").get<double>();
    policy.criterion = parse_fairness_criterion(doc.at("criterion").get<std::string>());
    policy.achieved_disparity = doc.at("achieved_disparity").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, "malformed policy file " + path.string() + ": " + e.what());
  }
  return policy;
}

}  // namespace fogfair
