#include "qfc/systems.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace qfc {

namespace {

std::uint64_t instance_seed(std::uint64_t seed, const std::string& id) {
  // splitmix64 over the seed xor the id hash
  std::uint64_t z = seed ^ fnv1a64({id});
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

VertexSet run_ilp(const ILPModel& m, const Instance& inst, long node_limit) {
  if (inst.graph->transformed()) return decode(*inst.graph, m, inst.query, inst.budget, node_limit).nodes;
  const ParseGraph g = transform_root_edges(*inst.graph);
  return decode(g, m, inst.query, inst.budget, node_limit).nodes;
}

void collect_lr_names(const LRModel& m, const Instance& inst, std::map<std::string, bool>& names) {
  NameSink sink;
  const auto visit = [&](const CompressionState& s, Position v, int) { featurize(s, v, m.config, m.lexicon, sink); };
  if (inst.gold) {
    for_each_oracle_decision(inst, visit);
  } else {
    CompressionState s(inst);
    while (s.queue_size() > 0) {
      const Position v = s.pop_next();
      visit(s, v, 0);
      s.reject();
    }
  }
  for (auto& n : sink.names) names.emplace(std::move(n), true);
}

void collect_edge_names(const ParseGraph& g, const Lexicon& lex, std::map<std::string, bool>& names) {
  NameSink sink;
  for (Position v = 1; v <= g.size(); ++v) {
    edge_features(g, -1, v, lex, sink);
    for (Position u : g.neighbors(v)) edge_features(g, u, v, lex, sink);
    if (g.parent(v) == kRoot || g.has_aug_edge(v)) edge_features(g, kRoot, v, lex, sink);
  }
  for (auto& n : sink.names) names.emplace(std::move(n), true);
}

}  // namespace

System make_system(std::shared_ptr<const AnyModel> model, long ilp_node_limit) {
  if (const auto* lr = std::get_if<LRModel>(model.get())) {
    return [model, lr](const Instance& inst) { return compress(inst, LRDecisionModel(*lr)); };
  }
  if (const auto* rnd = std::get_if<RandomModel>(model.get())) {
    return [model, rnd](const Instance& inst) {
      const RandomPolicy policy(rnd->accept_prob, instance_seed(rnd->seed, inst.id));
      return compress(inst, policy);
    };
  }
  const auto* ilp = std::get_if<ILPModel>(model.get());
  return [model, ilp, ilp_node_limit](const Instance& inst) { return run_ilp(*ilp, inst, ilp_node_limit); };
}

std::string feature_dump(const AnyModel& model, const std::vector<Instance>& instances) {
  std::map<std::string, bool> names;
  const std::vector<double>* weights = nullptr;
  std::uint32_t dim = 0;
  if (const auto* lr = std::get_if<LRModel>(&model)) {
    for (const Instance& inst : instances) collect_lr_names(*lr, inst, names);
    weights = &lr->weights;
    dim = lr->config.dim;
  } else if (const auto* ilp = std::get_if<ILPModel>(&model)) {
    for (const Instance& inst : instances) {
      const ParseGraph g = inst.graph->transformed() ? *inst.graph : transform_root_edges(*inst.graph);
      collect_edge_names(g, ilp->lexicon, names);
    }
    weights = &ilp->weights;
    dim = ilp->config.dim;
  } else {
    return "name\tindex\tweight\n";
  }

  std::string out = "name\tindex\tweight\n";
  char buf[64];
  for (const auto& [name, unused] : names) {
    const std::uint32_t idx = feature_index(name, dim);
    const double w = (*weights)[idx];
    if (w == 0.0) continue;
    std::snprintf(buf, sizeof buf, "\t%u\t%.17g\n", idx, w);
    out += name;
    out += buf;
  }
  return out;
}

}  // namespace qfc
