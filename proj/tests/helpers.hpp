#pragma once

// Small builders shared by the unit tests.

#include <algorithm>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qfc/corpus.hpp"
#include "qfc/engine.hpp"

namespace qfc::testing {

struct Tok {
  std::string form;
  Position head;
  std::string label = "dep";
  std::string upos = "NOUN";
};

inline ParseGraph make_graph(const std::vector<Tok>& toks, std::string id = "t") {
  std::vector<Token> tokens;
  std::vector<DepEdge> edges;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Position p = static_cast<Position>(i + 1);
    tokens.push_back({p, toks[i].form, ascii_lower(toks[i].form), toks[i].upos, 0});
    edges.push_back({toks[i].head, p, toks[i].label, EdgeOrigin::tree});
  }
  return ParseGraph::build(std::move(id), std::move(tokens), std::move(edges));
}

/// Chain 1 <- 2 <- ... : token 1 is the root, token k+1 hangs off token k.
inline ParseGraph chain(int n, int word_len = 3, std::string id = "chain") {
  std::vector<Tok> toks;
  for (int i = 0; i < n; ++i) toks.push_back({std::string(static_cast<std::size_t>(word_len), 'a' + i % 26), i});
  return make_graph(toks, std::move(id));
}

/// Uniformly random recursive tree: token k's head is uniform in [0, k)
/// for k = 1 (root) and in [1, k) afterwards, then positions are shuffled.
inline ParseGraph random_tree(int n, std::mt19937_64& rng, std::string id = "rand") {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);  // order[k] = position of the k-th built node
  std::vector<Tok> toks(static_cast<std::size_t>(n));
  static const char* kUpos[] = {"NOUN", "VERB", "ADJ", "PROPN", "DET", "ADP"};
  static const char* kLabels[] = {"nsubj", "obj", "amod", "det", "case", "nmod"};
  for (int k = 0; k < n; ++k) {
    const Position p = order[static_cast<std::size_t>(k)];
    const Position head = k == 0 ? kRoot : order[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(k))];
    const std::size_t len = 1 + rng() % 7;
    toks[static_cast<std::size_t>(p - 1)] = {std::string(len, static_cast<char>('a' + rng() % 26)), head,
                                             kLabels[rng() % 6], kUpos[rng() % 6]};
  }
  return make_graph(toks, std::move(id));
}

inline Instance make_instance(ParseGraph g, VertexSet query, int budget, std::optional<VertexSet> gold = {}) {
  Instance inst;
  inst.id = g.id();
  inst.graph = std::make_shared<const ParseGraph>(std::move(g));
  inst.query = std::move(query);
  inst.budget = budget;
  inst.gold = std::move(gold);
  return inst;
}

class ConstModel final : public DecisionModel {
 public:
  explicit ConstModel(double p) : p_(p) {}
  double score(const CompressionState&, Position) const override { return p_; }

 private:
  double p_;
};

}  // namespace qfc::testing
