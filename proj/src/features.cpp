#include "qfc/features.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "qfc/error.hpp"

namespace qfc {

namespace {

constexpr std::array<std::string_view, 10> kTenths = {"[0.0,0.1)", "[0.1,0.2)", "[0.2,0.3)", "[0.3,0.4)", "[0.4,0.5)",
                                                      "[0.5,0.6)", "[0.6,0.7)", "[0.7,0.8)", "[0.8,0.9)", "[0.9,1.0)"};

std::string_view tenth_bucket(long num, long den) {
  if (den <= 0) return kTenths[0];
  const long b = std::clamp<long>(num * 10 / den, 0, 9);
  return kTenths[static_cast<std::size_t>(b)];
}

std::string_view char_len_bucket(int len) { return len <= 3 ? "<=3" : len <= 7 ? "4-7" : "8+"; }

std::string_view distance_bucket(int d) {
  static constexpr std::array<std::string_view, 4> kSmall = {"0", "1", "2", "3"};
  if (d <= 3) return kSmall[static_cast<std::size_t>(d)];
  return d <= 6 ? "4-6" : "7+";
}

std::string_view depth_bucket(int d) {
  static constexpr std::array<std::string_view, 6> kDepth = {"0", "1", "2", "3", "4", "5"};
  return d <= 5 ? kDepth[static_cast<std::size_t>(d)] : "6+";
}

std::string_view count_bucket(int c) {
  static constexpr std::array<std::string_view, 4> kCount = {"0", "1", "2", "3"};
  return c <= 3 ? kCount[static_cast<std::size_t>(c)] : "4+";
}

std::string_view size_bucket(int c) {
  if (c <= 3) return count_bucket(c);
  return c <= 5 ? "4-5" : c <= 9 ? "6-9" : "10+";
}

bool is_negation(const Token& t) {
  const std::string low = ascii_lower(t.form);
  return low == "not" || low == "never" || low == "no" || low == "n't";
}

constexpr std::string_view kOov = "<oov>";

std::string_view lexical(const Lexicon& lex, const Token& t) {
  return lex.contains(t.lemma) ? std::string_view(t.lemma) : kOov;
}

enum class Direction { u_governs_v, v_governs_u, no_edge };

Direction direction(const ParseGraph& g, Position u, Position v) {
  if (u < 0) return Direction::no_edge;
  return g.parent(v) == u ? Direction::u_governs_v : Direction::v_governs_u;
}

std::string_view direction_name(Direction d) {
  switch (d) {
    case Direction::u_governs_v: return "u_governs_v";
    case Direction::v_governs_u: return "v_governs_u";
    case Direction::no_edge: break;
  }
  return "no_edge";
}

struct StatefulIndicator {
  std::string_view key;
  std::string_view value;
};

std::array<StatefulIndicator, 6> stateful_indicators(const CompressionState& s, Position v) {
  std::string_view pos = "empty";
  if (s.accepted_count() > 0) pos = v < s.min_accepted() ? "left" : v > s.max_accepted() ? "right" : "inside";
  bool adjacent = false;
  for (Position w : s.graph().neighbors(v)) adjacent = adjacent || s.is_accepted(w);
  return {{
      {"pos=", pos},
      {"budget=", tenth_bucket(s.used_chars(), s.budget())},
      {"csize=", size_bucket(s.accepted_count())},
      {"consumed=", tenth_bucket(s.timestep(), s.initial_queue_size())},
      {"adj=", adjacent ? "1" : "0"},
      {"clen=", char_len_bucket(s.graph().token(v).char_len)},
  }};
}

}  // namespace

// ---------------------------------------------------------------------------

double FeatureVector::value_at(std::uint32_t index) const {
  const auto it = std::lower_bound(indices.begin(), indices.end(), index);
  return it != indices.end() && *it == index ? values[static_cast<std::size_t>(it - indices.begin())] : 0.0;
}

void FeatureConfig::validate() const {
  if (dim < (1u << 16) || (dim & (dim - 1)) != 0)
    throw ContractError("feature dimension must be a power of two >= 65536, got " + std::to_string(dim));
  if (lexical_vocab_cutoff < 0) throw ContractError("lexical_vocab_cutoff must be >= 0");
}

Lexicon::Lexicon(std::vector<std::string> lemmas) : lemmas_(std::move(lemmas)) {
  set_.insert(lemmas_.begin(), lemmas_.end());
}

Lexicon Lexicon::build(const std::vector<const ParseGraph*>& graphs, int cutoff) {
  std::map<std::string, long> counts;
  for (const ParseGraph* g : graphs)
    for (const Token& t : g->tokens()) ++counts[t.lemma];
  std::vector<std::pair<std::string, long>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> top;
  for (std::size_t i = 0; i < ranked.size() && static_cast<int>(i) < cutoff; ++i) top.push_back(ranked[i].first);
  return Lexicon(std::move(top));
}

bool Lexicon::contains(std::string_view lemma) const { return set_.find(lemma) != set_.end(); }

// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(std::initializer_list<std::string_view> parts) noexcept {
  std::uint64_t h = 14695981039346656037ull;
  for (std::string_view p : parts)
    for (unsigned char c : p) {
      h ^= c;
      h *= 1099511628211ull;
    }
  return h;
}

std::uint32_t feature_index(std::string_view name, std::uint32_t dim) noexcept {
  return static_cast<std::uint32_t>(fnv1a64({name}) & (dim - 1));
}

HashingSink::HashingSink(std::uint32_t dim) : mask_(dim - 1) { entries_.reserve(64); }

void HashingSink::add(std::initializer_list<std::string_view> parts, double value) {
  entries_.emplace_back(static_cast<std::uint32_t>(fnv1a64(parts) & mask_), value);
}

FeatureVector HashingSink::finish() {
  std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  FeatureVector fv;
  fv.dim = mask_ + 1;
  fv.indices.reserve(entries_.size());
  fv.values.reserve(entries_.size());
  for (const auto& [idx, val] : entries_) {
    if (!fv.indices.empty() && fv.indices.back() == idx)
      fv.values.back() += val;
    else {
      fv.indices.push_back(idx);
      fv.values.push_back(val);
    }
  }
  entries_.clear();
  return fv;
}

void NameSink::add(std::initializer_list<std::string_view> parts, double) {
  std::string name;
  for (std::string_view p : parts) name += p;
  names.push_back(std::move(name));
}

// ---------------------------------------------------------------------------

void edge_features(const ParseGraph& g, Position u, Position v, const Lexicon& lex, FeatureSink& sink) {
  const Token& tv = g.token(v);
  const std::string_view clen = char_len_bucket(tv.char_len);
  if (u < 0) {
    sink.add({"e|none"});
    sink.add({"e|none&cupos=", tv.upos});
    sink.add({"e|none&clen=", clen});
    return;
  }

  std::string_view label;
  std::string_view rev;
  if (g.parent(v) == u) {
    label = g.parent_label(v);
  } else if (u > 0 && g.parent(u) == v) {
    label = g.parent_label(u);
    rev = "^";
  } else if (u == kRoot && g.has_aug_edge(v)) {
    label = "root_aug";
  } else {
    throw ContractError("no edge between " + std::to_string(u) + " and " + std::to_string(v) + " in " + g.id());
  }

  // syntactic
  sink.add({"e|label=", rev, label});
  sink.add({"e|label&cupos=", rev, label, "&", tv.upos});
  sink.add({"e|hupos=", u == kRoot ? std::string_view("ROOT") : std::string_view(g.token(u).upos)});
  // structural
  sink.add({"e|depth=", depth_bucket(g.depth(v))});
  sink.add({"e|nchild=", count_bucket(static_cast<int>(g.children(v).size()))});
  sink.add({"e|clen=", clen});
  sink.add({"e|dist=", u == kRoot ? std::string_view("root") : distance_bucket(std::abs(u - v))});
  // semantic
  if (is_negation(tv)) sink.add({"e|neg"});
  if (!g.has_punct_child(v)) sink.add({"e|nopunct"});
  // lexical
  const std::string_view lv = lexical(lex, tv);
  const std::string_view lu = u == kRoot ? std::string_view("<root>") : lexical(lex, g.token(u));
  sink.add({"e|lemma=", lv});
  sink.add({"e|lemmas=", lu, "&", lv});
}

void stateful_features(const CompressionState& s, Position v, FeatureSink& sink) {
  for (const auto& [key, value] : stateful_indicators(s, v)) sink.add({"s|", key, value});
}

void interaction_features(const CompressionState& s, Position v, FeatureSink& sink) {
  const ParseGraph& g = s.graph();
  const std::string_view label = g.parent_label(v);
  const std::string_view dir = direction_name(direction(g, s.connecting_vertex(v), v));
  for (const auto& [key, value] : stateful_indicators(s, v)) {
    sink.add({"x|", key, value, "&lab=", label});
    sink.add({"x|", key, value, "&dir=", dir});
  }
}

void featurize(const CompressionState& s, Position v, const FeatureConfig& config, const Lexicon& lex,
               FeatureSink& sink) {
  if (config.use_edge) edge_features(s.graph(), s.connecting_vertex(v), v, lex, sink);
  if (config.use_stateful) stateful_features(s, v, sink);
  if (config.use_interaction) interaction_features(s, v, sink);
  if (!config.use_edge && !config.use_stateful && !config.use_interaction) sink.add({"bias"});
}

FeatureVector edge_features(const ParseGraph& g, Position u, Position v, const Lexicon& lex, std::uint32_t dim) {
  HashingSink sink(dim);
  edge_features(g, u, v, lex, sink);
  return sink.finish();
}

FeatureVector featurize(const CompressionState& s, Position v, const FeatureConfig& config, const Lexicon& lex) {
  HashingSink sink(config.dim);
  featurize(s, v, config, lex, sink);
  return sink.finish();
}

}  // namespace qfc
