#pragma once

// Edge-selection compression baseline. A compression is an arborescence
// rooted at the synthetic root over the root-augmented parse: every kept
// token takes exactly one incoming edge, either from its tree parent (when
// the parent is kept) or from the root. The objective is the sum of learned
// edge scores, subject to Q ⊆ C and ℓ(C) ≤ b.
//
// Connectivity is structural: tokens are branched in parent-before-child
// order and a tree edge is only selectable once its head is kept, so every
// leaf of the search is a valid arborescence and no flow variables are
// needed. Bounds combine the current objective with a fractional knapsack
// over the optimistic gain of undecided tokens.

#include <cstdint>
#include <functional>
#include <vector>

#include "qfc/corpus.hpp"
#include "qfc/features.hpp"

namespace qfc {

/// Per-token incoming edge scores. For a token governed by the root in the
/// tree both entries hold the score of that single edge.
struct EdgeScores {
  std::vector<double> parent;  // tree edge parent(v) -> v, index v
  std::vector<double> root;    // edge 0 -> v (augmented or tree), index v
};

struct ILPModel {
  FeatureConfig config = FeatureConfig::ablated();
  Lexicon lexicon;
  std::vector<double> weights;  // hashed edge-feature space, length config.dim
  int epochs_trained = 0;
};

struct SolveStats {
  long nodes_expanded = 0;
  bool proven_optimal = false;
};

struct ILPSolution {
  std::vector<DepEdge> selected_edges;  // ordered by child
  double objective = 0.0;
  VertexSet nodes;
  SolveStats stats;
};

inline constexpr long kDefaultNodeLimit = 500000;
inline constexpr long kUnlimitedNodes = -1;

/// w·f(e) for every edge of a transformed graph, via the shared edge features.
EdgeScores score_edges(const ParseGraph& g, const ILPModel& model);

/// Exact branch-and-bound decoding. node_limit < 0 means unlimited; when the
/// limit is hit the best incumbent is returned with proven_optimal = false.
/// Throws ContractError for an untransformed graph or node_limit == 0 and
/// InfeasibleError when ℓ(Q) > b.
ILPSolution decode(const ParseGraph& g, const EdgeScores& scores, const VertexSet& query, int budget,
                   long node_limit = kDefaultNodeLimit);
ILPSolution decode(const ParseGraph& g, const ILPModel& model, const VertexSet& query, int budget,
                   long node_limit = kDefaultNodeLimit);

/// Brute force over all token subsets (|V| ≤ 16), each token taking its
/// best available incoming edge. Test oracle for decode().
ILPSolution enumerate_exact(const ParseGraph& g, const EdgeScores& scores, const VertexSet& query, int budget);

/// Σ scores of the best available incoming edge per token, summed in
/// position order. Shared by both solvers so equal sets score identically.
double arborescence_objective(const ParseGraph& g, const EdgeScores& scores, const VertexSet& nodes);

/// Edges a token set selects when each token takes its best available edge.
std::vector<DepEdge> best_edges(const ParseGraph& g, const EdgeScores& scores, const VertexSet& nodes);

/// Independent check of the solution invariants: edges exist in g, each
/// node has one incoming edge whose head is the root or a kept node,
/// Q ⊆ nodes, ℓ(nodes) ≤ b, and the objective matches the edge scores.
/// Returns an empty string when valid, else a description.
std::string validate_solution(const ParseGraph& g, const EdgeScores& scores, const VertexSet& query, int budget,
                              const ILPSolution& sol);

/// Tree edges internal to gold plus root edges for gold tokens whose parent
/// is outside gold.
std::vector<DepEdge> gold_arborescence(const ParseGraph& g, const VertexSet& gold);

struct PerceptronPair {
  std::shared_ptr<const ParseGraph> graph;  // transformed on the fly if needed
  VertexSet gold;
};

struct PerceptronOptions {
  int epochs = 6;
  long node_limit = kDefaultNodeLimit;
  std::uint32_t dim = 1u << 18;
  /// Called after every example with the current (non-averaged) weights.
  std::function<void(long step, const std::vector<double>& weights)> on_step;
  /// Called after every epoch with the averaged model so far.
  std::function<void(int epoch, const ILPModel& averaged)> on_epoch;
};

struct PerceptronStats {
  long steps = 0;
  long updates = 0;
  long skipped = 0;  // decodes that hit the node limit
};

/// Averaged structured perceptron. Each example is decoded with b = ℓ(gold)
/// and Q = {}, then w += f(gold arborescence) - f(predicted edges). The
/// returned weights are the mean of the weights after every example.
ILPModel train_perceptron(const std::vector<PerceptronPair>& pairs, const Lexicon& lexicon,
                          const PerceptronOptions& options = {}, PerceptronStats* stats = nullptr);

}  // namespace qfc
