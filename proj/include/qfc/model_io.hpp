#pragma once

// Versioned JSON model files:
//   {"format": "qfc-model", "version": 1, "kind": "lr"|"ablated"|"random"|"ilp",
//    "config": {...}, "c", "bias", "lexicon": [...], "weights": [[index, value], ...]}
// Random policies store accept_prob and seed instead of weights. Only
// nonzero weights are written, in ascending index order.

#include <filesystem>
#include <string>
#include <variant>

#include <json.hpp>

#include "qfc/ilp.hpp"
#include "qfc/learn.hpp"

namespace qfc {

inline constexpr const char* kModelFormat = "qfc-model";
inline constexpr int kModelVersion = 1;

struct RandomModel {
  double accept_prob = 0.0;
  std::uint64_t seed = 0;
};

using AnyModel = std::variant<LRModel, RandomModel, ILPModel>;

nlohmann::json config_to_json(const FeatureConfig& config);
/// Validates the result.
FeatureConfig config_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const LRModel& model);
nlohmann::json model_to_json(const RandomModel& model);
nlohmann::json model_to_json(const ILPModel& model);

/// Throws ParseError on an unknown format, version or kind, and
/// ContractError when weights fall outside D or the config contradicts
/// the kind (an "ablated" model must use edge features only; ILP models too).
AnyModel model_from_json(const nlohmann::json& j);
/// "lr", "ablated", "random" or "ilp".
std::string model_kind(const AnyModel& model);

void save_model(const std::filesystem::path& path, const AnyModel& model);
AnyModel load_model(const std::filesystem::path& path);

}  // namespace qfc
