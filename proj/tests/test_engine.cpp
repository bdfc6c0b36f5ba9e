#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "qfc/error.hpp"
#include "qfc/instance_io.hpp"

using namespace qfc;
using qfc::testing::chain;
using qfc::testing::ConstModel;
using qfc::testing::make_graph;
using qfc::testing::make_instance;

namespace {

// Score depends on the candidate and the state so pop order matters.
class HashModel final : public DecisionModel {
 public:
  explicit HashModel(std::uint64_t salt) : salt_(salt) {}
  double score(const CompressionState& s, Position v) const override {
    std::uint64_t h = salt_ ^ (static_cast<std::uint64_t>(v) * 0x9E3779B97F4A7C15ull) ^
                      (static_cast<std::uint64_t>(s.accepted_count()) << 32);
    h ^= h >> 29;
    h *= 0xBF58476D1CE4E5B9ull;
    h ^= h >> 32;
    return static_cast<double>(h % 1000) / 999.0;
  }

 private:
  std::uint64_t salt_;
};

// Quadratic restatement of the acceptance loop: scan the whole queue for
// the leftmost vertex adjacent to C, else the leftmost vertex.
VertexSet reference_compress(const Instance& inst, const DecisionModel& model, std::vector<Position>& pops) {
  const ParseGraph& g = *inst.graph;
  std::set<Position> c(inst.query.begin(), inst.query.end());
  std::set<Position> p;
  for (Position v = 1; v <= g.size(); ++v)
    if (!c.count(v)) p.insert(v);
  const auto length = [&](const std::set<Position>& s) { return linear_length(g, VertexSet(s.begin(), s.end())); };

  CompressionState mirror(inst);  // only to hand the model a state object
  while (length(c) < inst.budget && !p.empty()) {
    Position pick = 0;
    for (Position v : p) {
      bool adj = false;
      for (Position w : g.neighbors(v)) adj = adj || c.count(w);
      if (adj) {
        pick = v;
        break;
      }
    }
    if (pick == 0) pick = *p.begin();
    p.erase(pick);
    pops.push_back(pick);
    const Position popped = mirror.pop_next();
    REQUIRE(popped == pick);
    std::set<Position> with = c;
    with.insert(pick);
    if (model.score(mirror, pick) > 0.5 && length(with) <= inst.budget) {
      c = with;
      mirror.accept();
    } else {
      mirror.reject();
    }
  }
  return VertexSet(c.begin(), c.end());
}

void check_state_invariants(const CompressionState& s, const Instance& inst) {
  const VertexSet acc = s.accepted();
  const VertexSet rej = s.rejected();
  const VertexSet que = s.queued();
  std::vector<int> seen(static_cast<std::size_t>(inst.graph->size() + 1), 0);
  for (Position v : acc) ++seen[static_cast<std::size_t>(v)];
  for (Position v : rej) ++seen[static_cast<std::size_t>(v)];
  for (Position v : que) ++seen[static_cast<std::size_t>(v)];
  if (s.candidate()) ++seen[static_cast<std::size_t>(s.candidate())];
  for (Position v = 1; v <= inst.graph->size(); ++v) REQUIRE(seen[static_cast<std::size_t>(v)] == 1);
  REQUIRE(is_subset(inst.query, acc));
  REQUIRE(s.used_chars() == linear_length(*inst.graph, acc));
  REQUIRE(s.used_chars() <= inst.budget);
  REQUIRE(s.timestep() == static_cast<int>(acc.size() - inst.query.size() + rej.size()));
  REQUIRE(s.queue_size() == static_cast<int>(que.size()));
}

}  // namespace

TEST_CASE("init_state") {
  const ParseGraph g = chain(5);
  SUBCASE("query seeds the compression") {
    const Instance inst = make_instance(g, {2}, 100);
    const CompressionState s = init_state(inst);
    CHECK(s.accepted() == VertexSet{2});
    CHECK(s.queue_size() == 4);
    CHECK(s.rejected().empty());
    CHECK(s.timestep() == 0);
  }
  SUBCASE("empty query") {
    const Instance inst = make_instance(g, {}, 10);
    const CompressionState s = init_state(inst);
    CHECK(s.accepted().empty());
    CHECK(s.queue_size() == 5);
  }
  SUBCASE("query longer than the budget is infeasible") {
    const ParseGraph wide = make_graph({{std::string(40, 'x'), 0}, {std::string(39, 'y'), 1}});
    const Instance inst = make_instance(wide, {1, 2}, 75);
    CHECK(linear_length(wide, {1, 2}) == 80);
    CHECK_THROWS_AS(init_state(inst), InfeasibleError);
    CHECK_THROWS_AS(compress(inst, ConstModel(1.0)), InfeasibleError);
  }
}

TEST_CASE("pop_next priority") {
  const ParseGraph g = chain(4);  // 1 - 2 - 3 - 4
  SUBCASE("leftmost neighbor of C first") {
    const Instance inst = make_instance(g, {2}, 100);
    CompressionState s(inst);
    CHECK(pop_next(s) == 1);
  }
  SUBCASE("left to right without neighbors") {
    const Instance inst = make_instance(chain(3), {}, 100);
    CompressionState s(inst);
    CHECK(pop_next(s) == 1);
  }
  SUBCASE("sole neighbor") {
    const Instance inst = make_instance(g, {4}, 100);
    CompressionState s(inst);
    CHECK(pop_next(s) == 3);
  }
  SUBCASE("accepting promotes the new neighbors") {
    const Instance inst = make_instance(g, {4}, 100);
    CompressionState s(inst);
    REQUIRE(s.pop_next() == 3);
    s.accept();
    CHECK(s.is_promoted(2));
    CHECK_FALSE(s.is_promoted(1));
    CHECK(s.pop_next() == 2);
    s.reject();
    CHECK(s.pop_next() == 1);  // 2 was rejected, so 1 is no longer adjacent to C
    s.reject();
    CHECK(s.queue_size() == 0);
    CHECK_THROWS_AS(s.pop_next(), ContractError);
  }
  SUBCASE("an undecided candidate blocks the next pop") {
    const Instance inst = make_instance(g, {}, 100);
    CompressionState s(inst);
    s.pop_next();
    CHECK_THROWS_AS(s.pop_next(), ContractError);
  }
}

TEST_CASE("connecting vertex is the earliest-accepted neighbor") {
  // 2 heads 1 and 3; 3 heads 4.
  const ParseGraph g = make_graph({{"a", 2}, {"b", 0}, {"c", 2}, {"d", 3}});
  const Instance inst = make_instance(g, {4}, 100);
  CompressionState s(inst);
  REQUIRE(s.pop_next() == 3);
  CHECK(s.connecting_vertex(3) == 4);
  s.accept();
  REQUIRE(s.pop_next() == 2);
  CHECK(s.connecting_vertex(2) == 3);
  s.accept();
  REQUIRE(s.pop_next() == 1);
  CHECK(s.connecting_vertex(1) == 2);
  CHECK(s.accept_time(4) == 0);
  CHECK(s.accept_time(3) == 1);
  CHECK(s.accept_time(2) == 2);
  CHECK(s.accept_time(1) == -1);
  CHECK(s.connecting_vertex(1) == 2);
}

TEST_CASE("compress examples") {
  SUBCASE("always accept keeps everything that fits") {
    const ParseGraph g = make_graph({{"ab", 0}, {"cd", 1}, {"ef", 1}});
    CHECK(compress(make_instance(g, {}, 100), ConstModel(1.0)) == VertexSet{1, 2, 3});
  }
  SUBCASE("always reject returns the query") {
    CHECK(compress(make_instance(chain(5), {2}, 100), ConstModel(0.0)) == VertexSet{2});
  }
  SUBCASE("third token fails the budget") {
    // 5, 5 + 1 + 5 = 11, 17 > 11
    const ParseGraph g = make_graph({{"aaaaa", 0}, {"bbbbb", 0 + 1}, {"ccccc", 1}});
    CompressionTrace trace;
    CHECK(compress(make_instance(g, {}, 11), ConstModel(1.0), &trace) == VertexSet{1, 2});
    CHECK(trace.pops == std::vector<Position>{1, 2});  // loop stops once ℓ(C) = b
  }
  SUBCASE("budget blocks a vertex but later smaller ones still fit") {
    const ParseGraph g = make_graph({{"aaaaa", 0}, {"bbbbbbbbbb", 1}, {"c", 1}});
    CompressionTrace trace;
    CHECK(compress(make_instance(g, {}, 8), ConstModel(1.0), &trace) == VertexSet{1, 3});
    CHECK(trace.pops == std::vector<Position>{1, 2, 3});
    CHECK(trace.accepted == std::vector<std::uint8_t>{1, 0, 1});
  }
  SUBCASE("a score of exactly one half rejects") {
    CHECK(compress(make_instance(chain(4), {1}, 100), ConstModel(0.5)) == VertexSet{1});
    CHECK(compress(make_instance(chain(4), {1}, 100), ConstModel(std::nextafter(0.5, 1.0))) ==
          VertexSet{1, 2, 3, 4});
  }
}

TEST_CASE("compress matches a quadratic restatement of the loop") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 14);
    const ParseGraph g = qfc::testing::random_tree(n, rng);
    VertexSet q;
    for (Position v = 1; v <= n; ++v)
      if (rng() % 5 == 0) q.push_back(v);
    const int qlen = linear_length(g, q);
    const int budget = std::max(1, qlen + static_cast<int>(rng() % static_cast<std::uint64_t>(g.char_len() + 2)));
    const Instance inst = make_instance(g, q, budget);
    const HashModel model(rng());

    std::vector<Position> ref_pops;
    const VertexSet ref = reference_compress(inst, model, ref_pops);
    CompressionTrace trace;
    const VertexSet got = compress(inst, model, &trace);
    CHECK(got == ref);
    CHECK(trace.pops == ref_pops);
    CHECK(static_cast<int>(trace.pops.size()) <= n - static_cast<int>(q.size()));
    CHECK(compress(inst, model) == got);  // determinism
  }
}

TEST_CASE("state invariants hold at every step") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const ParseGraph g = qfc::testing::random_tree(n, rng);
    VertexSet q;
    for (Position v = 1; v <= n; ++v)
      if (rng() % 4 == 0) q.push_back(v);
    const Instance inst = make_instance(g, q, linear_length(g, q) + 1 + static_cast<int>(rng() % 30));
    CompressionState s(inst);
    check_state_invariants(s, inst);
    while (s.used_chars() < inst.budget && s.queue_size() > 0) {
      const Position v = s.pop_next();
      check_state_invariants(s, inst);
      if (rng() % 2 && s.length_with(v) <= inst.budget)
        s.accept();
      else
        s.reject();
      check_state_invariants(s, inst);
    }
  }
}

TEST_CASE("oracle_path examples") {
  const ParseGraph g = chain(6);
  SUBCASE("gold equal to the query rejects everything") {
    const Instance inst = make_instance(g, {3}, 100, VertexSet{3});
    const auto path = oracle_path(inst);
    CHECK_FALSE(path.empty());
    for (const Decision& d : path) CHECK(d.label == 0);
  }
  SUBCASE("gold equal to the sentence accepts everything") {
    const Instance inst = make_instance(g, {}, g.char_len(), VertexSet{1, 2, 3, 4, 5, 6});
    const auto path = oracle_path(inst);
    CHECK(path.size() == 6);
    for (const Decision& d : path) CHECK(d.label == 1);
  }
  SUBCASE("snapshots and serialization") {
    const Instance inst = make_instance(g, {2}, 100, VertexSet{2, 3});
    const auto path = oracle_path(inst);
    REQUIRE(path.size() >= 2);
    CHECK(path[0].candidate == 1);
    CHECK(path[0].snapshot.candidate() == 1);
    CHECK(path[0].snapshot.timestep() == 0);
    CHECK(path[1].snapshot.timestep() == 1);
    const auto j = decision_to_json(inst.id, path[1]);
    CHECK(j.dump() == R"({"candidate":3,"instance_id":"chain","label":1,"timestep":1})");
  }
  SUBCASE("bad golds are rejected") {
    CHECK_THROWS_AS(oracle_path(make_instance(g, {2}, 100)), ContractError);
    CHECK_THROWS_AS(oracle_path(make_instance(g, {2}, 100, VertexSet{3})), ContractError);
    CHECK_THROWS_AS(oracle_path(make_instance(g, {}, 5, VertexSet{1, 2})), ContractError);
  }
}

TEST_CASE("oracle reconstructs the gold on random 8-token trees") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 1000; ++trial) {
    const ParseGraph g = qfc::testing::random_tree(8, rng);
    VertexSet gold, q;
    for (Position v = 1; v <= 8; ++v) {
      if (rng() % 2) {
        gold.push_back(v);
        if (rng() % 3 == 0) q.push_back(v);
      }
    }
    if (gold.empty()) gold.push_back(1 + static_cast<Position>(rng() % 8));
    const Instance inst = make_instance(g, q, linear_length(g, gold), gold);
    VertexSet accepted = q;
    for_each_oracle_decision(inst, [&](const CompressionState& s, Position v, int label) {
      CHECK(is_subset(s.accepted(), gold));
      if (label) accepted.push_back(v);
    });
    normalize(accepted);
    CHECK(accepted == gold);
  }
}
