#include "qfc/model_io.hpp"

#include "qfc/error.hpp"
#include "qfc/instance_io.hpp"

namespace qfc {

using nlohmann::json;

namespace {

json sparse_weights(const std::vector<double>& w) {
  json out = json::array();
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] != 0.0) out.push_back(json::array({i, w[i]}));
  return out;
}

std::vector<double> dense_weights(const json& j, std::uint32_t dim) {
  std::vector<double> w(dim, 0.0);
  for (const json& pair : j) {
    const auto idx = pair.at(0).get<std::int64_t>();
    if (idx < 0 || idx >= static_cast<std::int64_t>(dim))
      throw ContractError("weight index " + std::to_string(idx) + " outside D = " + std::to_string(dim));
    w[static_cast<std::size_t>(idx)] = pair.at(1).get<double>();
  }
  return w;
}

json header(const char* kind) { return {{"format", kModelFormat}, {"version", kModelVersion}, {"kind", kind}}; }

}  // namespace

json config_to_json(const FeatureConfig& c) {
  return {{"edge", c.use_edge},
          {"stateful", c.use_stateful},
          {"interaction", c.use_interaction},
          {"dim", c.dim},
          {"lexical_vocab_cutoff", c.lexical_vocab_cutoff}};
}

FeatureConfig config_from_json(const json& j) {
  FeatureConfig c;
  c.use_edge = j.at("edge").get<bool>();
  c.use_stateful = j.at("stateful").get<bool>();
  c.use_interaction = j.at("interaction").get<bool>();
  c.dim = j.at("dim").get<std::uint32_t>();
  c.lexical_vocab_cutoff = j.at("lexical_vocab_cutoff").get<int>();
  c.validate();
  return c;
}

json model_to_json(const LRModel& m) {
  json j = header(m.config.is_ablated() ? "ablated" : "lr");
  j["config"] = config_to_json(m.config);
  j["c"] = m.inverse_reg_c;
  j["bias"] = m.bias;
  j["lexicon"] = m.lexicon.lemmas();
  j["weights"] = sparse_weights(m.weights);
  return j;
}

json model_to_json(const RandomModel& m) {
  json j = header("random");
  j["accept_prob"] = m.accept_prob;
  j["seed"] = m.seed;
  return j;
}

json model_to_json(const ILPModel& m) {
  json j = header("ilp");
  j["config"] = config_to_json(m.config);
  j["epochs"] = m.epochs_trained;
  j["lexicon"] = m.lexicon.lemmas();
  j["weights"] = sparse_weights(m.weights);
  return j;
}

AnyModel model_from_json(const json& j) {
  if (!j.is_object() || j.value("format", "") != kModelFormat) throw ParseError("not a qfc model file", 0);
  const int version = j.value("version", 0);
  if (version != kModelVersion) throw ParseError("unsupported model version " + std::to_string(version), 0);
  const std::string kind = j.value("kind", "");

  if (kind == "random") {
    RandomModel m{j.at("accept_prob").get<double>(), j.at("seed").get<std::uint64_t>()};
    if (!(m.accept_prob >= 0.0 && m.accept_prob <= 1.0)) throw ContractError("accept_prob must lie in [0, 1]");
    return m;
  }
  if (kind != "lr" && kind != "ablated" && kind != "ilp") throw ParseError("unknown model kind '" + kind + "'", 0);

  const FeatureConfig config = config_from_json(j.at("config"));
  if ((kind == "ablated" || kind == "ilp") && !config.is_ablated())
    throw ContractError(kind + " model must use edge features only");
  if (kind == "lr" && config.is_ablated()) throw ContractError("lr model has an edge-only config; use kind ablated");
  Lexicon lexicon(j.at("lexicon").get<std::vector<std::string>>());
  std::vector<double> weights = dense_weights(j.at("weights"), config.dim);

  if (kind == "ilp") {
    ILPModel m;
    m.config = config;
    m.lexicon = std::move(lexicon);
    m.weights = std::move(weights);
    m.epochs_trained = j.value("epochs", 0);
    return m;
  }
  LRModel m;
  m.config = config;
  m.lexicon = std::move(lexicon);
  m.inverse_reg_c = j.at("c").get<double>();
  m.bias = j.at("bias").get<double>();
  m.weights = std::move(weights);
  return m;
}

std::string model_kind(const AnyModel& model) {
  if (const auto* lr = std::get_if<LRModel>(&model)) return lr->config.is_ablated() ? "ablated" : "lr";
  if (std::holds_alternative<RandomModel>(model)) return "random";
  return "ilp";
}

void save_model(const std::filesystem::path& path, const AnyModel& model) {
  const json j = std::visit([](const auto& m) { return model_to_json(m); }, model);
  write_text_file(path, j.dump() + "\n");
}

AnyModel load_model(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
  return model_from_json(j);
}

}  // namespace qfc
