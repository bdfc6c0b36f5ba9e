#include "qfc/datagen.hpp"

#include <algorithm>
#include <cmath>

#include "qfc/error.hpp"
#include "qfc/eval.hpp"

namespace qfc {

using nlohmann::json;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void QueryLengthDist::validate() const {
  if (probs.empty()) throw ContractError("query length distribution is empty");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw ContractError("query length probabilities must be nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ContractError("query length probabilities sum to " + std::to_string(sum));
  if (!(proper_noun_weight >= 0.0 && proper_noun_weight <= 1.0))
    throw ContractError("proper_noun_weight must lie in [0, 1]");
}

QueryLengthDist QueryLengthDist::from_json(const json& j) {
  QueryLengthDist d;
  if (j.contains("lengths")) {
    // {"lengths": {"1": 0.4, "2": 0.6}}
    std::vector<double> probs;
    for (const auto& [k, v] : j["lengths"].items()) {
      const int len = std::stoi(k);
      if (len < 1) throw ContractError("query lengths start at 1");
      if (static_cast<int>(probs.size()) < len) probs.resize(static_cast<std::size_t>(len), 0.0);
      probs[static_cast<std::size_t>(len - 1)] = v.get<double>();
    }
    d.probs = std::move(probs);
  }
  if (j.contains("proper_noun_weight")) d.proper_noun_weight = j["proper_noun_weight"].get<double>();
  d.validate();
  return d;
}

json QueryLengthDist::to_json() const {
  json lengths = json::object();
  for (std::size_t i = 0; i < probs.size(); ++i) lengths[std::to_string(i + 1)] = probs[i];
  return {{"lengths", lengths}, {"proper_noun_weight", proper_noun_weight}};
}

std::optional<Instance> build_instance(std::shared_ptr<const ParseGraph> graph, VertexSet gold,
                                       const QueryLengthDist& dist, std::mt19937_64& rng) {
  normalize(gold);
  for (Position v : gold)
    if (v < 1 || v > graph->size()) throw ContractError("gold position out of range in " + graph->id());

  // |Q| by inverse CDF.
  const double u = uniform01(rng);
  std::size_t len = dist.probs.size();
  double cdf = 0.0;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    cdf += dist.probs[i];
    if (u < cdf) {
      len = i + 1;
      break;
    }
  }

  std::vector<Position> proper, common;
  for (Position v : gold) {
    const std::string& upos = graph->token(v).upos;
    if (upos == "PROPN")
      proper.push_back(v);
    else if (upos == "NOUN")
      common.push_back(v);
  }
  if (proper.size() + common.size() < len) return std::nullopt;

  VertexSet query;
  while (query.size() < len) {
    const bool want_proper = uniform01(rng) < dist.proper_noun_weight;
    std::vector<Position>& pool = (want_proper && !proper.empty()) || common.empty() ? proper : common;
    const std::size_t k = uniform_below(rng(), pool.size());
    query.push_back(pool[k]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
  }
  normalize(query);

  Instance inst;
  inst.id = graph->id();
  inst.budget = linear_length(*graph, gold);
  inst.graph = std::move(graph);
  inst.query = std::move(query);
  inst.gold = std::move(gold);
  inst.validate();
  return inst;
}

CorpusSplit split_corpus(const std::vector<std::string>& split_tags, std::uint64_t seed, const SplitOptions& options) {
  CorpusSplit out;
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < split_tags.size(); ++i) (split_tags[i] == "test" ? out.test : pool).push_back(i);

  std::mt19937_64 rng(seed);
  for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[uniform_below(rng(), i)]);

  std::size_t reserve = options.validation_size;
  if (pool.size() <= options.validation_size) {
    reserve = static_cast<std::size_t>(std::llround(options.fallback_fraction * static_cast<double>(pool.size())));
    out.used_fallback = true;
  }
  out.validation.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(reserve));
  out.train.assign(pool.begin() + static_cast<std::ptrdiff_t>(reserve), pool.end());
  std::sort(out.validation.begin(), out.validation.end());
  std::sort(out.train.begin(), out.train.end());
  return out;
}

}  // namespace qfc
