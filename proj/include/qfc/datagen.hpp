#pragma once

// Constrained-compression tuples from (sentence, gold) pairs, corpus
// splitting, and a small grammar-driven generator of parsed English-like
// sentences with headline-style golds for desk-scale experiments.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfc/corpus.hpp"

namespace qfc {

/// Query cardinality distribution and proper-vs-common noun preference.
/// The defaults are configurable placeholders, not measured query-log values.
struct QueryLengthDist {
  std::vector<double> probs = {0.30, 0.35, 0.20, 0.10, 0.05};  // |Q| = 1..5
  double proper_noun_weight = 0.4;

  /// Throws ContractError unless probs is nonempty, nonnegative and sums to 1 (±1e-9).
  void validate() const;
  static QueryLengthDist from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Uniform double in [0, 1) from one engine draw.
double uniform01(std::mt19937_64& rng);

/// b = ℓ(gold); |Q| ~ dist; query nouns (NOUN/PROPN) drawn from gold without
/// replacement, proper nouns with probability proper_noun_weight when both
/// kinds remain. Returns nullopt (skip) when gold lacks enough nouns.
std::optional<Instance> build_instance(std::shared_ptr<const ParseGraph> graph, VertexSet gold,
                                       const QueryLengthDist& dist, std::mt19937_64& rng);

struct SplitOptions {
  std::size_t validation_size = 24999;
  double fallback_fraction = 0.1;
};

struct CorpusSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
  bool used_fallback = false;
};

/// Items tagged "test" form the test split; the rest are shuffled under the
/// seed and validation_size of them reserved for validation. When the pool
/// is no larger than validation_size, round(fallback_fraction * pool) are
/// reserved instead and used_fallback is set. Index lists are ascending.
CorpusSplit split_corpus(const std::vector<std::string>& split_tags, std::uint64_t seed,
                         const SplitOptions& options = {});

/// Parsed sentences from a fixed English grammar (determiners, adjectives,
/// compounds, names, auxiliaries, negation, prepositional modifiers,
/// coordination, relative and adverbial clauses, punctuation).
std::vector<ParseGraph> synthesize_sentences(int count, std::uint64_t seed);

/// A headline-style gold compression: the root predicate, its core
/// arguments, and a label- and position-dependent random selection of other
/// dependents, always a connected subtree containing the root dependent.
VertexSet synthesize_gold(const ParseGraph& g, std::mt19937_64& rng);

}  // namespace qfc
