#include <fstream>
#include <set>

#include "ucgan/error.hpp"
#include "ucgan/train/train.hpp"

namespace ucgan::train {

using nlohmann::json;

void TrainConfig::validate() const {
  if (batch_size == 0) throw ContractError("train config: batch_size must be at least 1");
  if (!(learning_rate > 0.0)) throw ContractError("train config: learning_rate must be positive");
  if (epochs == 0 && max_iterations == 0) throw ContractError("train config: epochs must be at least 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw ContractError("train config: betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ContractError("train config: adam_eps must be positive");
  loss_weights.validate();
  soft_labels.validate();
}

json TrainConfig::to_json() const {
  json weights = json::object();
  json enabled = json::array();
  for (auto t : losses::kAllTerms) {
    weights[losses::to_string(t)] = loss_weights.weight(t);
    if (loss_weights.enabled(t)) enabled.push_back(losses::to_string(t));
  }
  return {
      {"batch_size", batch_size},
      {"learning_rate", learning_rate},
      {"epochs", epochs},
      {"beta1", beta1},
      {"beta2", beta2},
      {"adam_eps", adam_eps},
      {"loss_weights", weights},
      {"enabled_terms", enabled},
      {"soft_labels", {{"a", {soft_labels.a_min, soft_labels.a_max}}, {"b", {soft_labels.b_min, soft_labels.b_max}}}},
      {"block", net::to_string(block_kind)},
      {"pooling", losses::to_string(pooling_kind)},
      {"seed", seed},
      {"checkpoint_every", checkpoint_every},
      {"holdout", holdout},
      {"max_iterations", max_iterations},
  };
}

namespace {

std::pair<double, double> read_range(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 2) throw ContractError(std::string("soft_labels.") + key + " must be [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

TrainConfig TrainConfig::from_json(const json& j) {
  if (!j.is_object()) throw ContractError("train config must be a JSON object");
  static const std::set<std::string> known = {
      "batch_size", "learning_rate", "epochs",  "beta1",   "beta2",           "adam_eps", "loss_weights",
      "enabled_terms", "soft_labels", "block", "pooling", "seed", "checkpoint_every", "holdout", "max_iterations"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ContractError("train config: unknown key '" + key + "'");
  }
  TrainConfig c;
  try {
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<std::size_t>();
    if (j.contains("learning_rate")) c.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("epochs")) c.epochs = j["epochs"].get<std::size_t>();
    if (j.contains("beta1")) c.beta1 = j["beta1"].get<double>();
    if (j.contains("beta2")) c.beta2 = j["beta2"].get<double>();
    if (j.contains("adam_eps")) c.adam_eps = j["adam_eps"].get<double>();
    if (j.contains("loss_weights")) {
      for (const auto& [key, value] : j["loss_weights"].items()) {
        c.loss_weights.set_weight(losses::parse_term(key), value.get<double>());
      }
    }
    if (j.contains("enabled_terms")) {
      for (auto t : losses::kAllTerms) c.loss_weights.set_enabled(t, false);
      for (const auto& name : j["enabled_terms"]) c.loss_weights.set_enabled(losses::parse_term(name), true);
    }
    if (j.contains("soft_labels")) {
      const auto& s = j["soft_labels"];
      for (const auto& [key, value] : s.items()) {
        if (key != "a" && key != "b") throw ContractError("soft_labels: unknown key '" + key + "'");
      }
      if (s.contains("a")) std::tie(c.soft_labels.a_min, c.soft_labels.a_max) = read_range(s["a"], "a");
      if (s.contains("b")) std::tie(c.soft_labels.b_min, c.soft_labels.b_max) = read_range(s["b"], "b");
    }
    if (j.contains("block")) c.block_kind = net::parse_block_kind(j["block"].get<std::string>());
    if (j.contains("pooling")) c.pooling_kind = losses::parse_pooling(j["pooling"].get<std::string>());
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("checkpoint_every")) c.checkpoint_every = j["checkpoint_every"].get<std::size_t>();
    if (j.contains("holdout")) c.holdout = j["holdout"].get<std::size_t>();
    if (j.contains("max_iterations")) c.max_iterations = j["max_iterations"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw ContractError(std::string("train config: ") + e.what());
  }
  c.validate();
  return c;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("config " + path.string() + ": " + e.what());
  }
  return TrainConfig::from_json(j);
}

std::vector<NamedWeights> loss_ablation_grid() {
  std::vector<NamedWeights> grid;
  for (auto t : losses::kAllTerms) {
    losses::LossWeights w;
    w.set_enabled(t, false);
    grid.push_back({"no_" + losses::to_string(t), w});
  }
  for (auto t : losses::kAllTerms) {
    losses::LossWeights w;
    for (auto u : losses::kAllTerms) w.set_enabled(u, u == t);
    grid.push_back({"only_" + losses::to_string(t), w});
  }
  return grid;
}

std::vector<NamedWeights> weight_sweep_grid() {
  struct Setting {
    losses::Term term;
    double low, high;
  };
  static constexpr Setting settings[] = {
      {losses::Term::cyc, 1e-4, 1e-2},
      {losses::Term::adv, 1e-4, 1e-2},
      {losses::Term::rec, 5e-5, 5e-3},
      {losses::Term::nrf, 0.1, 10.0},
  };
  std::vector<NamedWeights> grid;
  grid.push_back({"default", losses::LossWeights{}});
  for (const auto& s : settings) {
    losses::LossWeights low, high;
    low.set_weight(s.term, s.low);
    high.set_weight(s.term, s.high);
    grid.push_back({losses::to_string(s.term) + "_x0.1", low});
    grid.push_back({losses::to_string(s.term) + "_x10", high});
  }
  return grid;
}

}  // namespace ucgan::train
