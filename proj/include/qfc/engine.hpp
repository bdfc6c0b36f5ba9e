#pragma once

// Vertex-addition transition system. A compression grows from the query
// set one parse vertex at a time; each vertex is popped at most once, so a
// full run costs O(|V| + |E|) plus one model call per popped vertex.

#include <cstdint>
#include <functional>
#include <vector>

#include "qfc/corpus.hpp"

namespace qfc {

/// (C_i, P_i) plus the rejected set and timestep. Copyable so decisions can
/// carry a snapshot.
class CompressionState {
 public:
  enum class Status : std::uint8_t { queued, candidate, accepted, rejected };

  /// C_0 = Q, P_0 = V \ Q. Throws InfeasibleError when the query alone
  /// exceeds the budget and ContractError for an invalid instance.
  explicit CompressionState(const Instance& inst);

  const Instance& instance() const noexcept { return *inst_; }
  const ParseGraph& graph() const noexcept { return *inst_->graph; }

  Status status(Position v) const { return status_[static_cast<std::size_t>(v)]; }
  bool is_accepted(Position v) const { return status(v) == Status::accepted; }
  bool in_queue(Position v) const { return status(v) == Status::queued; }
  /// True iff v is queued in the priority (neighbor) bucket.
  bool is_promoted(Position v) const;

  int budget() const noexcept { return inst_->budget; }
  int used_chars() const noexcept { return used_chars_; }
  int timestep() const noexcept { return timestep_; }
  int accepted_count() const noexcept { return accepted_count_; }
  int rejected_count() const noexcept { return rejected_count_; }
  int queue_size() const noexcept { return queue_size_; }
  int initial_queue_size() const noexcept { return initial_queue_size_; }
  /// Leftmost / rightmost accepted position, 0 when nothing is accepted.
  Position min_accepted() const noexcept { return min_accepted_; }
  Position max_accepted() const noexcept { return max_accepted_; }
  /// The popped vertex awaiting a decision, 0 if none.
  Position candidate() const noexcept { return candidate_; }

  /// ℓ(C ∪ {v}) for a vertex not yet accepted.
  int length_with(Position v) const;
  /// Timestep at which v joined C: 0 for query vertexes, i + 1 for a vertex
  /// accepted at timestep i, -1 when not accepted.
  int accept_time(Position v) const { return accept_time_[static_cast<std::size_t>(v)]; }
  /// Accepted tree-neighbor of v that joined C earliest (ties: leftmost);
  /// -1 when v has no accepted neighbor.
  Position connecting_vertex(Position v) const;

  /// Removes and returns the queue head: the leftmost promoted vertex if
  /// any, else the leftmost remaining vertex. Throws ContractError when the
  /// queue is empty or a previous candidate is still undecided.
  Position pop_next();
  /// Resolve the current candidate.
  void accept();
  void reject();

  VertexSet accepted() const;
  VertexSet rejected() const;
  VertexSet queued() const;

 private:
  void promote_neighbors(Position v);

  const Instance* inst_;
  std::vector<Status> status_;
  std::vector<int> accept_time_;
  std::vector<std::uint64_t> promoted_bits_;
  Position cursor_ = 1;  // non-neighbor bucket scans left to right
  Position candidate_ = 0;
  int used_chars_ = 0;
  int timestep_ = 0;
  int accepted_count_ = 0;
  int rejected_count_ = 0;
  int queue_size_ = 0;
  int initial_queue_size_ = 0;
  Position min_accepted_ = 0;
  Position max_accepted_ = 0;
};

/// init_state
inline CompressionState init_state(const Instance& inst) { return CompressionState(inst); }
/// pop_next
inline Position pop_next(CompressionState& state) { return state.pop_next(); }

/// p(y = 1 | v, C, P, S). Implementations must be deterministic in their
/// inputs unless documented as stochastic.
class DecisionModel {
 public:
  virtual ~DecisionModel() = default;
  virtual double score(const CompressionState& state, Position candidate) const = 0;
};

struct Decision {
  Position candidate = 0;
  int label = 0;  // 1 accept, 0 reject
  CompressionState snapshot;
};

struct CompressionTrace {
  std::vector<Position> pops;
  std::vector<std::uint8_t> accepted;  // parallel to pops
};

/// Runs the acceptance loop: while ℓ(C) < b and the queue is nonempty, pop
/// v and accept it iff score > 0.5 and ℓ(C ∪ {v}) ≤ b. The output always
/// contains Q and fits b; a violation throws std::logic_error.
VertexSet compress(const Instance& inst, const DecisionModel& model, CompressionTrace* trace = nullptr);

/// Visits each oracle decision before it is applied. The oracle accepts a
/// vertex iff it is in the gold set. Throws ContractError when the gold
/// set is missing or violates Q or b.
void for_each_oracle_decision(const Instance& inst,
                              const std::function<void(const CompressionState&, Position, int)>& visit);

/// Full oracle path with state snapshots.
std::vector<Decision> oracle_path(const Instance& inst);

}  // namespace qfc
