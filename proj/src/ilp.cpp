#include "qfc/ilp.hpp"

#include <algorithm>
#include <cmath>

#include "qfc/error.hpp"
#include "qfc/kernels.hpp"

namespace qfc {

namespace {

double dot(const std::vector<double>& w, const FeatureVector& fv) { return kernels::gather_dot(w, fv.indices, fv.values); }

// Space-inclusive cost: ℓ(C) ≤ b  ⇔  Σ (len + 1) ≤ b + 1.
int token_cost(const ParseGraph& g, Position v) { return g.token(v).char_len + 1; }

std::vector<Position> preorder(const ParseGraph& g) {
  std::vector<Position> order;
  order.reserve(static_cast<std::size_t>(g.size()));
  std::vector<Position> stack;
  const auto roots = g.children(kRoot);
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) stack.push_back(*it);
  while (!stack.empty()) {
    const Position v = stack.back();
    stack.pop_back();
    order.push_back(v);
    const auto ch = g.children(v);
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

void check_inputs(const ParseGraph& g, const EdgeScores& scores, const VertexSet& query, int budget) {
  if (!g.transformed()) throw ContractError("graph " + g.id() + " lacks root-augmented edges");
  const auto need = static_cast<std::size_t>(g.size() + 1);
  if (scores.parent.size() != need || scores.root.size() != need)
    throw ContractError("edge scores do not match graph " + g.id());
  for (Position q : query)
    if (q < 1 || q > g.size()) throw ContractError("query position out of range");
  const int qlen = linear_length(g, query);
  if (qlen > budget)
    throw InfeasibleError("graph " + g.id() + ": query needs " + std::to_string(qlen) + " chars, budget is " +
                          std::to_string(budget));
}

class BranchAndBound {
 public:
  BranchAndBound(const ParseGraph& g, const EdgeScores& s, const VertexSet& query, int budget, long limit)
      : g_(g), s_(s), cap_(budget + 1), limit_(limit), order_(preorder(g)) {
    const auto sz = static_cast<std::size_t>(g.size() + 1);
    state_.assign(sz, kUndecided);
    state_[0] = kIn;
    in_q_.assign(sz, 0);
    cost_.assign(sz, 0);
    for (Position v = 1; v <= g.size(); ++v) cost_[static_cast<std::size_t>(v)] = token_cost(g, v);
    for (Position q : query) {
      in_q_[static_cast<std::size_t>(q)] = 1;
      reserve_q_ += cost_[static_cast<std::size_t>(q)];
    }
    // Incumbent: the query alone.
    best_state_.assign(sz, kOut);
    best_state_[0] = kIn;
    for (Position q : query) best_state_[static_cast<std::size_t>(q)] = kIn;
    best_obj_ = arborescence_objective(g, s, query);
  }

  void run() { search(0); }

  VertexSet best_nodes() const {
    VertexSet out;
    for (Position v = 1; v <= g_.size(); ++v)
      if (best_state_[static_cast<std::size_t>(v)] == kIn) out.push_back(v);
    return out;
  }
  long expanded() const { return expanded_; }
  bool aborted() const { return aborted_; }

 private:
  static constexpr std::int8_t kUndecided = -1, kOut = 0, kIn = 1;

  std::int8_t st(Position v) const { return state_[static_cast<std::size_t>(v)]; }
  double sp(Position v) const { return s_.parent[static_cast<std::size_t>(v)]; }
  double sr(Position v) const { return s_.root[static_cast<std::size_t>(v)]; }

  double gain_if_included(Position v) const {
    const Position p = g_.parent(v);
    if (p == kRoot || st(p) != kIn) return sr(v);
    return std::max(sp(v), sr(v));
  }

  double optimistic_gain(Position v) const {
    const Position p = g_.parent(v);
    if (p == kRoot || st(p) == kOut) return sr(v);
    return std::max(sp(v), sr(v));
  }

  double bound(std::size_t k) {
    double b = cur_obj_;
    items_.clear();
    for (std::size_t i = k; i < order_.size(); ++i) {
      const Position v = order_[i];
      const double gain = optimistic_gain(v);
      if (in_q_[static_cast<std::size_t>(v)])
        b += gain;
      else if (gain > 0)
        items_.push_back({gain, cost_[static_cast<std::size_t>(v)]});
    }
    int room = cap_ - cur_cost_ - reserve_q_;
    std::sort(items_.begin(), items_.end(), [](const Item& x, const Item& y) { return x.gain * y.cost > y.gain * x.cost; });
    for (const Item& it : items_) {
      if (room <= 0) break;
      if (it.cost <= room) {
        b += it.gain;
        room -= it.cost;
      } else {
        b += it.gain * static_cast<double>(room) / static_cast<double>(it.cost);
        room = 0;
      }
    }
    return b;
  }

  void search(std::size_t k) {
    if (aborted_) return;
    if (limit_ >= 0 && expanded_ >= limit_) {
      aborted_ = true;
      return;
    }
    ++expanded_;
    if (k == order_.size()) {
      if (cur_obj_ > best_obj_) {
        best_obj_ = cur_obj_;
        best_state_ = state_;
      }
      return;
    }
    if (bound(k) <= best_obj_ + 1e-12 * (1.0 + std::abs(best_obj_))) return;

    const Position v = order_[k];
    const auto vi = static_cast<std::size_t>(v);
    const bool forced = in_q_[vi] != 0;
    const double gain = gain_if_included(v);
    const int reserve_after = reserve_q_ - (forced ? cost_[vi] : 0);
    const bool fits = cur_cost_ + cost_[vi] + reserve_after <= cap_;

    const auto include = [&] {
      state_[vi] = kIn;
      cur_obj_ += gain;
      cur_cost_ += cost_[vi];
      const int saved = reserve_q_;
      reserve_q_ = reserve_after;
      search(k + 1);
      reserve_q_ = saved;
      cur_cost_ -= cost_[vi];
      cur_obj_ -= gain;
      state_[vi] = kUndecided;
    };
    const auto exclude = [&] {
      state_[vi] = kOut;
      search(k + 1);
      state_[vi] = kUndecided;
    };

    if (forced) {
      include();  // always fits: the reserve already holds its cost
    } else if (fits && gain > 0) {
      include();
      exclude();
    } else {
      exclude();
      if (fits) include();
    }
  }

  struct Item {
    double gain;
    int cost;
  };

  const ParseGraph& g_;
  const EdgeScores& s_;
  int cap_;
  long limit_;
  std::vector<Position> order_;
  std::vector<std::int8_t> state_;
  std::vector<std::uint8_t> in_q_;
  std::vector<int> cost_;
  std::vector<Item> items_;
  double cur_obj_ = 0.0;
  int cur_cost_ = 0;
  int reserve_q_ = 0;
  double best_obj_ = 0.0;
  std::vector<std::int8_t> best_state_;
  long expanded_ = 0;
  bool aborted_ = false;
};

ILPSolution make_solution(const ParseGraph& g, const EdgeScores& scores, VertexSet nodes) {
  ILPSolution sol;
  sol.selected_edges = best_edges(g, scores, nodes);
  sol.objective = arborescence_objective(g, scores, nodes);
  sol.nodes = std::move(nodes);
  return sol;
}

}  // namespace

EdgeScores score_edges(const ParseGraph& g, const ILPModel& model) {
  if (!g.transformed()) throw ContractError("graph " + g.id() + " lacks root-augmented edges");
  EdgeScores s;
  const auto sz = static_cast<std::size_t>(g.size() + 1);
  s.parent.assign(sz, 0.0);
  s.root.assign(sz, 0.0);
  HashingSink sink(model.config.dim);
  for (Position v = 1; v <= g.size(); ++v) {
    const Position p = g.parent(v);
    edge_features(g, p, v, model.lexicon, sink);
    const double tree = dot(model.weights, sink.finish());
    s.parent[static_cast<std::size_t>(v)] = tree;
    if (p == kRoot) {
      s.root[static_cast<std::size_t>(v)] = tree;
    } else {
      edge_features(g, kRoot, v, model.lexicon, sink);
      s.root[static_cast<std::size_t>(v)] = dot(model.weights, sink.finish());
    }
  }
  return s;
}

double arborescence_objective(const ParseGraph& g, const EdgeScores& scores, const VertexSet& nodes) {
  double obj = 0.0;
  for (Position v : nodes) {
    const Position p = g.parent(v);
    const auto vi = static_cast<std::size_t>(v);
    obj += p != kRoot && contains(nodes, p) ? std::max(scores.parent[vi], scores.root[vi]) : scores.root[vi];
  }
  return obj;
}

std::vector<DepEdge> best_edges(const ParseGraph& g, const EdgeScores& scores, const VertexSet& nodes) {
  std::vector<DepEdge> out;
  for (Position v : nodes) {
    const Position p = g.parent(v);
    const auto vi = static_cast<std::size_t>(v);
    if (p == kRoot || (contains(nodes, p) && scores.parent[vi] >= scores.root[vi]))
      out.push_back({p, v, g.parent_label(v), EdgeOrigin::tree});
    else
      out.push_back({kRoot, v, "root_aug", EdgeOrigin::root_augmented});
  }
  return out;
}

ILPSolution decode(const ParseGraph& g, const EdgeScores& scores, const VertexSet& query, int budget, long node_limit) {
  if (node_limit == 0) throw ContractError("node_limit must be nonzero");
  check_inputs(g, scores, query, budget);
  BranchAndBound bb(g, scores, query, budget, node_limit);
  bb.run();
  ILPSolution sol = make_solution(g, scores, bb.best_nodes());
  sol.stats.nodes_expanded = bb.expanded();
  sol.stats.proven_optimal = !bb.aborted();
  return sol;
}

ILPSolution decode(const ParseGraph& g, const ILPModel& model, const VertexSet& query, int budget, long node_limit) {
  return decode(g, score_edges(g, model), query, budget, node_limit);
}

ILPSolution enumerate_exact(const ParseGraph& g, const EdgeScores& scores, const VertexSet& query, int budget) {
  if (g.size() > 16) throw ContractError("enumerate_exact is limited to 16 tokens");
  check_inputs(g, scores, query, budget);
  const int n = g.size();
  std::uint32_t qmask = 0;
  for (Position q : query) qmask |= 1u << (q - 1);

  VertexSet best = query;
  double best_obj = arborescence_objective(g, scores, query);
  VertexSet nodes;
  long visited = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if ((mask & qmask) != qmask) continue;
    nodes.clear();
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1u) nodes.push_back(i + 1);
    ++visited;
    if (linear_length(g, nodes) > budget) continue;
    const double obj = arborescence_objective(g, scores, nodes);
    if (obj > best_obj) {
      best_obj = obj;
      best = nodes;
    }
  }
  ILPSolution sol = make_solution(g, scores, best);
  sol.stats.nodes_expanded = visited;
  sol.stats.proven_optimal = true;
  return sol;
}

std::string validate_solution(const ParseGraph& g, const EdgeScores& scores, const VertexSet& query, int budget,
                              const ILPSolution& sol) {
  std::vector<int> incoming(static_cast<std::size_t>(g.size() + 1), 0);
  double obj = 0.0;
  for (const DepEdge& e : sol.selected_edges) {
    if (e.child < 1 || e.child > g.size()) return "edge child out of range";
    const auto ci = static_cast<std::size_t>(e.child);
    if (++incoming[ci] > 1) return "token " + std::to_string(e.child) + " has two incoming edges";
    if (e.origin == EdgeOrigin::tree) {
      if (g.parent(e.child) != e.head) return "tree edge not in graph";
      if (e.head != kRoot && !contains(sol.nodes, e.head)) return "tree edge head not selected";
      obj += scores.parent[ci];
    } else {
      if (e.head != kRoot || !g.has_aug_edge(e.child)) return "augmented edge not in graph";
      obj += scores.root[ci];
    }
  }
  VertexSet children;
  for (const DepEdge& e : sol.selected_edges) children.push_back(e.child);
  normalize(children);
  if (children != sol.nodes) return "node set differs from edge children";
  if (!is_subset(query, sol.nodes)) return "query not contained";
  if (linear_length(g, sol.nodes) > budget) return "budget exceeded";
  if (std::abs(obj - sol.objective) > 1e-9 * (1.0 + std::abs(obj))) return "objective mismatch";
  return {};
}

std::vector<DepEdge> gold_arborescence(const ParseGraph& g, const VertexSet& gold) {
  std::vector<DepEdge> out;
  for (Position v : gold) {
    const Position p = g.parent(v);
    if (p == kRoot || contains(gold, p))
      out.push_back({p, v, g.parent_label(v), EdgeOrigin::tree});
    else
      out.push_back({kRoot, v, "root_aug", EdgeOrigin::root_augmented});
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct CachedExample {
  std::shared_ptr<const ParseGraph> graph;
  VertexSet gold;
  int budget = 0;
  std::vector<FeatureVector> parent_fv;  // index v
  std::vector<FeatureVector> root_fv;
  std::vector<DepEdge> gold_edges;
};

const FeatureVector& edge_fv(const CachedExample& ex, const DepEdge& e) {
  const auto vi = static_cast<std::size_t>(e.child);
  return e.origin == EdgeOrigin::tree ? ex.parent_fv[vi] : ex.root_fv[vi];
}

}  // namespace

ILPModel train_perceptron(const std::vector<PerceptronPair>& pairs, const Lexicon& lexicon,
                          const PerceptronOptions& options, PerceptronStats* stats) {
  if (pairs.empty()) throw ContractError("perceptron training needs at least one pair");
  if (options.epochs < 1) throw ContractError("perceptron training needs at least one epoch");
  FeatureConfig config = FeatureConfig::ablated();
  config.dim = options.dim;
  config.lexical_vocab_cutoff = static_cast<int>(lexicon.lemmas().size());
  config.validate();

  std::vector<CachedExample> examples;
  examples.reserve(pairs.size());
  HashingSink sink(config.dim);
  for (const PerceptronPair& p : pairs) {
    if (p.gold.empty()) throw ContractError("perceptron training needs nonempty golds");
    CachedExample ex;
    ex.graph = p.graph->transformed() ? p.graph : std::make_shared<const ParseGraph>(transform_root_edges(*p.graph));
    ex.gold = p.gold;
    ex.budget = linear_length(*ex.graph, ex.gold);
    const ParseGraph& g = *ex.graph;
    const auto sz = static_cast<std::size_t>(g.size() + 1);
    ex.parent_fv.resize(sz);
    ex.root_fv.resize(sz);
    for (Position v = 1; v <= g.size(); ++v) {
      edge_features(g, g.parent(v), v, lexicon, sink);
      ex.parent_fv[static_cast<std::size_t>(v)] = sink.finish();
      if (g.parent(v) == kRoot) {
        ex.root_fv[static_cast<std::size_t>(v)] = ex.parent_fv[static_cast<std::size_t>(v)];
      } else {
        edge_features(g, kRoot, v, lexicon, sink);
        ex.root_fv[static_cast<std::size_t>(v)] = sink.finish();
      }
    }
    ex.gold_edges = gold_arborescence(g, ex.gold);
    examples.push_back(std::move(ex));
  }

  std::vector<double> w(config.dim, 0.0);
  std::vector<double> acc(config.dim, 0.0);  // Σ (step - 1) * Δ
  PerceptronStats st;
  const auto apply = [&](const FeatureVector& fv, double sign) {
    const double scale = sign * static_cast<double>(st.steps - 1);
    for (std::size_t k = 0; k < fv.size(); ++k) {
      w[fv.indices[k]] += sign * fv.values[k];
      acc[fv.indices[k]] += scale * fv.values[k];
    }
  };
  const auto averaged = [&] {
    ILPModel m;
    m.config = config;
    m.lexicon = lexicon;
    m.weights.resize(config.dim);
    const double t = static_cast<double>(st.steps);
    for (std::size_t i = 0; i < w.size(); ++i) m.weights[i] = w[i] - acc[i] / t;
    return m;
  };

  EdgeScores scores;
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    for (const CachedExample& ex : examples) {
      ++st.steps;
      const ParseGraph& g = *ex.graph;
      const auto sz = static_cast<std::size_t>(g.size() + 1);
      scores.parent.assign(sz, 0.0);
      scores.root.assign(sz, 0.0);
      for (Position v = 1; v <= g.size(); ++v) {
        const auto vi = static_cast<std::size_t>(v);
        scores.parent[vi] = dot(w, ex.parent_fv[vi]);
        scores.root[vi] = dot(w, ex.root_fv[vi]);
      }
      const ILPSolution pred = decode(g, scores, {}, ex.budget, options.node_limit);
      if (!pred.stats.proven_optimal) {
        ++st.skipped;
      } else if (pred.selected_edges != ex.gold_edges) {
        ++st.updates;
        for (const DepEdge& e : ex.gold_edges) apply(edge_fv(ex, e), +1.0);
        for (const DepEdge& e : pred.selected_edges) apply(edge_fv(ex, e), -1.0);
      }
      if (options.on_step) options.on_step(st.steps, w);
    }
    if (options.on_epoch) options.on_epoch(epoch, averaged());
  }

  ILPModel model = averaged();
  model.epochs_trained = options.epochs;
  if (stats) *stats = st;
  return model;
}

}  // namespace qfc
