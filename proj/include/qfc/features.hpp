#pragma once

// Sparse hashed features for (state, candidate) pairs and for parse edges.
// The edge family is the single implementation shared by the logistic
// decision model and the ILP edge scorer.
//
// Feature names are '|'-namespaced ("e|", "s|", "x|") and hashed with
// 64-bit FNV-1a into [0, D); D is a power of two so the map is a mask.
// Colliding names add their values.

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "qfc/corpus.hpp"
#include "qfc/engine.hpp"

namespace qfc {

struct FeatureVector {
  std::uint32_t dim = 0;
  std::vector<std::uint32_t> indices;  // ascending, unique
  std::vector<double> values;

  std::size_t size() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }
  double value_at(std::uint32_t index) const;
};

struct FeatureConfig {
  bool use_edge = true;
  bool use_stateful = true;
  bool use_interaction = true;
  std::uint32_t dim = 1u << 18;
  int lexical_vocab_cutoff = 5000;

  static FeatureConfig full() { return {}; }
  /// Edge features only.
  static FeatureConfig ablated() { return {true, false, false}; }
  bool is_ablated() const noexcept { return use_edge && !use_stateful && !use_interaction; }
  /// Throws ContractError unless dim is a power of two ≥ 2^16 and the cutoff ≥ 0.
  void validate() const;

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

/// The most frequent training lemmas; anything else is out-of-vocabulary
/// for lexical features.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::vector<std::string> lemmas);
  /// Top `cutoff` lemmas by frequency, ties broken alphabetically.
  static Lexicon build(const std::vector<const ParseGraph*>& graphs, int cutoff);

  bool contains(std::string_view lemma) const;
  const std::vector<std::string>& lemmas() const noexcept { return lemmas_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };
  std::vector<std::string> lemmas_;
  std::unordered_set<std::string, Hash, std::equal_to<>> set_;
};

/// Receives features as name pieces that are concatenated without
/// separators; hashing sinks never materialize the joined string.
class FeatureSink {
 public:
  virtual ~FeatureSink() = default;
  virtual void add(std::initializer_list<std::string_view> parts, double value = 1.0) = 0;
};

/// Accumulates into a hashed FeatureVector.
class HashingSink final : public FeatureSink {
 public:
  explicit HashingSink(std::uint32_t dim);
  void add(std::initializer_list<std::string_view> parts, double value = 1.0) override;
  /// Sorts, merges collisions, and resets the sink.
  FeatureVector finish();

 private:
  std::uint32_t mask_;
  std::vector<std::pair<std::uint32_t, double>> entries_;
};

/// Collects readable names, for dumps and tests.
class NameSink final : public FeatureSink {
 public:
  void add(std::initializer_list<std::string_view> parts, double value = 1.0) override;
  std::vector<std::string> names;
};

std::uint64_t fnv1a64(std::initializer_list<std::string_view> parts) noexcept;
std::uint32_t feature_index(std::string_view name, std::uint32_t dim) noexcept;

/// Features of the edge joining u (the side already in the compression, or
/// the root) to candidate v. The edge may run u→v, v→u (labels get a '^'
/// prefix), or be a root-augmented edge. u = -1 emits the NONE family.
/// Throws ContractError when u and v are not joined by an edge.
void edge_features(const ParseGraph& g, Position u, Position v, const Lexicon& lex, FeatureSink& sink);
void stateful_features(const CompressionState& s, Position v, FeatureSink& sink);
void interaction_features(const CompressionState& s, Position v, FeatureSink& sink);
/// Enabled families plus, when every family is disabled, a lone bias feature.
void featurize(const CompressionState& s, Position v, const FeatureConfig& config, const Lexicon& lex,
               FeatureSink& sink);

FeatureVector edge_features(const ParseGraph& g, Position u, Position v, const Lexicon& lex, std::uint32_t dim);
FeatureVector featurize(const CompressionState& s, Position v, const FeatureConfig& config, const Lexicon& lex);

}  // namespace qfc
