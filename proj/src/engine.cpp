#include "qfc/engine.hpp"

#include <bit>
#include <stdexcept>
#include <string>

#include "qfc/error.hpp"

namespace qfc {

CompressionState::CompressionState(const Instance& inst) : inst_(&inst) {
  inst.validate();
  const ParseGraph& g = graph();
  const int n = g.size();
  const auto sz = static_cast<std::size_t>(n + 1);

  used_chars_ = linear_length(g, inst.query);
  if (used_chars_ > inst.budget)
    throw InfeasibleError("instance " + inst.id + ": query needs " + std::to_string(used_chars_) +
                          " chars, budget is " + std::to_string(inst.budget));

  status_.assign(sz, Status::queued);
  status_[0] = Status::accepted;  // root slot is never a candidate
  accept_time_.assign(sz, -1);
  promoted_bits_.assign((sz + 63) / 64, 0);
  for (Position q : inst.query) {
    status_[static_cast<std::size_t>(q)] = Status::accepted;
    accept_time_[static_cast<std::size_t>(q)] = 0;
  }
  accepted_count_ = static_cast<int>(inst.query.size());
  queue_size_ = initial_queue_size_ = n - accepted_count_;
  if (!inst.query.empty()) {
    min_accepted_ = inst.query.front();
    max_accepted_ = inst.query.back();
  }
  for (Position q : inst.query) promote_neighbors(q);
}

bool CompressionState::is_promoted(Position v) const {
  const auto u = static_cast<std::size_t>(v);
  return (promoted_bits_[u >> 6] >> (u & 63)) & 1u;
}

void CompressionState::promote_neighbors(Position v) {
  for (Position w : graph().neighbors(v)) {
    if (status(w) != Status::queued) continue;
    const auto u = static_cast<std::size_t>(w);
    promoted_bits_[u >> 6] |= std::uint64_t{1} << (u & 63);
  }
}

int CompressionState::length_with(Position v) const {
  return used_chars_ + graph().token(v).char_len + (accepted_count_ > 0 ? 1 : 0);
}

Position CompressionState::connecting_vertex(Position v) const {
  Position best = -1;
  int best_time = 0;
  for (Position w : graph().neighbors(v)) {
    const int t = accept_time(w);
    if (t < 0) continue;
    // neighbors() is position-ordered, so strict < keeps the leftmost on ties.
    if (best < 0 || t < best_time) {
      best = w;
      best_time = t;
    }
  }
  return best;
}

Position CompressionState::pop_next() {
  if (candidate_ != 0) throw ContractError("pop_next called before resolving candidate " + std::to_string(candidate_));
  if (queue_size_ == 0) throw ContractError("pop_next on an empty queue");

  Position v = 0;
  for (std::size_t w = 0; w < promoted_bits_.size(); ++w) {
    if (promoted_bits_[w] != 0) {
      v = static_cast<Position>(w * 64 + static_cast<std::size_t>(std::countr_zero(promoted_bits_[w])));
      promoted_bits_[w] &= promoted_bits_[w] - 1;
      break;
    }
  }
  if (v == 0) {
    while (status(cursor_) != Status::queued) ++cursor_;
    v = cursor_++;
  }
  status_[static_cast<std::size_t>(v)] = Status::candidate;
  candidate_ = v;
  --queue_size_;
  return v;
}

void CompressionState::accept() {
  if (candidate_ == 0) throw ContractError("accept without a popped candidate");
  const Position v = candidate_;
  used_chars_ = length_with(v);
  status_[static_cast<std::size_t>(v)] = Status::accepted;
  accept_time_[static_cast<std::size_t>(v)] = timestep_ + 1;
  if (accepted_count_ == 0 || v < min_accepted_) min_accepted_ = v;
  if (accepted_count_ == 0 || v > max_accepted_) max_accepted_ = v;
  ++accepted_count_;
  ++timestep_;
  candidate_ = 0;
  promote_neighbors(v);
}

void CompressionState::reject() {
  if (candidate_ == 0) throw ContractError("reject without a popped candidate");
  status_[static_cast<std::size_t>(candidate_)] = Status::rejected;
  ++rejected_count_;
  ++timestep_;
  candidate_ = 0;
}

namespace {

VertexSet collect(const std::vector<CompressionState::Status>& status, CompressionState::Status want) {
  VertexSet out;
  for (std::size_t v = 1; v < status.size(); ++v)
    if (status[v] == want) out.push_back(static_cast<Position>(v));
  return out;
}

}  // namespace

VertexSet CompressionState::accepted() const { return collect(status_, Status::accepted); }
VertexSet CompressionState::rejected() const { return collect(status_, Status::rejected); }
VertexSet CompressionState::queued() const { return collect(status_, Status::queued); }

// ---------------------------------------------------------------------------

VertexSet compress(const Instance& inst, const DecisionModel& model, CompressionTrace* trace) {
  CompressionState state(inst);
  while (state.used_chars() < state.budget() && state.queue_size() > 0) {
    const Position v = state.pop_next();
    // Budget first: a vertex that cannot fit is rejected without a model call.
    const bool take = state.length_with(v) <= state.budget() && model.score(state, v) > 0.5;
    if (take)
      state.accept();
    else
      state.reject();
    if (trace) {
      trace->pops.push_back(v);
      trace->accepted.push_back(take ? 1 : 0);
    }
  }
  VertexSet out = state.accepted();
  if (!is_subset(inst.query, out) || linear_length(*inst.graph, out) > inst.budget)
    throw std::logic_error("compression of " + inst.id + " violates its constraints");
  return out;
}

void for_each_oracle_decision(const Instance& inst,
                              const std::function<void(const CompressionState&, Position, int)>& visit) {
  if (!inst.gold) throw ContractError("instance " + inst.id + " has no gold compression");
  const VertexSet& gold = *inst.gold;
  if (!is_subset(inst.query, gold)) throw ContractError("instance " + inst.id + ": gold does not contain the query");
  const int gold_len = linear_length(*inst.graph, gold);
  if (gold_len > inst.budget)
    throw ContractError("instance " + inst.id + ": gold length " + std::to_string(gold_len) + " exceeds budget " +
                        std::to_string(inst.budget));

  CompressionState state(inst);
  while (state.used_chars() < state.budget() && state.queue_size() > 0) {
    const Position v = state.pop_next();
    const int label = contains(gold, v) ? 1 : 0;
    visit(state, v, label);
    if (label)
      state.accept();
    else
      state.reject();
  }
}

std::vector<Decision> oracle_path(const Instance& inst) {
  std::vector<Decision> out;
  for_each_oracle_decision(inst, [&](const CompressionState& s, Position v, int label) {
    out.push_back({v, label, s});
  });
  return out;
}

}  // namespace qfc
