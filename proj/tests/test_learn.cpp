#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qfc/datagen.hpp"
#include "qfc/error.hpp"
#include "qfc/eval.hpp"
#include "qfc/learn.hpp"

using namespace qfc;

namespace {

constexpr std::uint32_t kDim = 1u << 16;

FeatureVector fv(std::vector<std::uint32_t> idx, std::vector<double> vals) {
  return {kDim, std::move(idx), std::move(vals)};
}

LRModel zero_model() {
  LRModel m;
  m.config.dim = kDim;
  m.weights.assign(kDim, 0.0);
  return m;
}

// Noisy data: label follows feature 1 vs 2 with flips, plus shared features.
TrainingSet noisy_data(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  TrainingSet d;
  for (int i = 0; i < n; ++i) {
    const int y = static_cast<int>(rng() % 2);
    const bool flip = rng() % 5 == 0;
    std::vector<std::uint32_t> idx = {(y ^ flip) ? 1u : 2u, 10u + static_cast<std::uint32_t>(rng() % 6)};
    std::sort(idx.begin(), idx.end());
    d.features.push_back(fv(idx, {1.0, 1.0}));
    d.labels.push_back(y);
  }
  return d;
}

double l2(const std::vector<double>& w) {
  double s = 0.0;
  for (double x : w) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("predict arithmetic") {
  LRModel m = zero_model();
  CHECK(predict(m, fv({5}, {1.0})) == 0.5);
  m.weights[5] = std::log(3.0);
  CHECK(predict(m, fv({5}, {1.0})) == doctest::Approx(0.75).epsilon(1e-15));
  m.bias = 1e6;
  const double hi = predict(m, fv({}, {}));
  CHECK(hi < 1.0);
  CHECK(hi > 0.999);
  m.bias = -1e6;
  const double lo = predict(m, fv({}, {}));
  CHECK(lo > 0.0);
  CHECK(std::isfinite(std::log(lo)));
  CHECK_THROWS_AS(predict(m, FeatureVector{kDim, {kDim}, {1.0}}), ContractError);
}

TEST_CASE("predict agrees with a log-space recomputation") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal(0.0, 2.0);
  LRModel m = zero_model();
  for (double& w : m.weights) w = normal(rng);
  m.bias = normal(rng);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::uint32_t> idx;
    for (int k = 0; k < 20; ++k) idx.push_back(static_cast<std::uint32_t>(rng() % kDim));
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    std::vector<double> vals;
    for (std::size_t k = 0; k < idx.size(); ++k) vals.push_back(normal(rng));
    long double z = m.bias;
    for (std::size_t k = 0; k < idx.size(); ++k) z += static_cast<long double>(m.weights[idx[k]]) * vals[k];
    const long double log_p = z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
    CHECK(static_cast<double>(std::exp(log_p)) == doctest::Approx(predict(m, fv(idx, vals))).epsilon(1e-9));
  }
}

TEST_CASE("objective at the origin is N ln 2") {
  const TrainingSet d = noisy_data(1, 37);
  CHECK(logistic_objective(d, std::vector<double>(kDim, 0.0), 0.0, 10.0) ==
        doctest::Approx(37 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("separable data is fit exactly") {
  TrainingSet d;
  d.features = {fv({1}, {1.0}), fv({1, 3}, {1.0, 1.0}), fv({2}, {1.0}), fv({2, 3}, {1.0, 1.0})};
  d.labels = {1, 1, 0, 0};
  FeatureConfig cfg;
  cfg.dim = kDim;
  LRTrainStats st;
  const LRModel m = train_lr(d, cfg, Lexicon{}, {}, &st);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK((predict(m, d.features[i]) > 0.5) == (d.labels[i] == 1));
  CHECK(st.final_loss < st.initial_loss);
  CHECK(st.initial_loss == doctest::Approx(4 * std::log(2.0)));
}

TEST_CASE("training reaches a stationary point of the stated objective") {
  const TrainingSet d = noisy_data(4, 400);
  FeatureConfig cfg;
  cfg.dim = kDim;
  LRTrainStats st;
  const LRModel m = train_lr(d, cfg, Lexicon{}, {}, &st);
  CHECK(st.converged);
  const double f = logistic_objective(d, m.weights, m.bias, m.inverse_reg_c);
  CHECK(f == doctest::Approx(st.final_loss).epsilon(1e-12));
  // No coordinate step improves the objective by more than rounding.
  for (std::uint32_t k : {1u, 2u, 10u, 12u, 15u}) {
    for (double h : {1e-4, -1e-4}) {
      std::vector<double> w = m.weights;
      w[k] += h;
      CHECK(logistic_objective(d, w, m.bias, m.inverse_reg_c) >= f - 1e-9);
    }
  }
  CHECK(logistic_objective(d, m.weights, m.bias + 1e-4, m.inverse_reg_c) >= f - 1e-9);
  CHECK(m.weights[1] > 0);
  CHECK(m.weights[2] < 0);
  CHECK(m.weights[999] == 0.0);
}

TEST_CASE("weight norm shrinks with stronger regularization") {
  const TrainingSet d = noisy_data(7, 300);
  FeatureConfig cfg;
  cfg.dim = kDim;
  double prev = std::numeric_limits<double>::infinity();
  for (double c : {100.0, 10.0, 1.0, 0.1}) {
    LROptions opt;
    opt.c = c;
    const double norm = l2(train_lr(d, cfg, Lexicon{}, opt).weights);
    CHECK(norm <= prev + 1e-9);
    prev = norm;
  }
}

TEST_CASE("training is deterministic") {
  const TrainingSet d = noisy_data(9, 200);
  FeatureConfig cfg;
  cfg.dim = kDim;
  const LRModel a = train_lr(d, cfg, Lexicon{}, {});
  const LRModel b = train_lr(d, cfg, Lexicon{}, {});
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
}

TEST_CASE("training errors") {
  TrainingSet d;
  d.features = {fv({1}, {1.0}), fv({2}, {1.0})};
  d.labels = {1, 1};
  FeatureConfig cfg;
  cfg.dim = kDim;
  CHECK_THROWS_AS(train_lr(d, cfg, Lexicon{}, {}), Error);
  d.labels = {1, 0};
  LROptions opt;
  opt.c = 0;
  CHECK_THROWS_AS(train_lr(d, cfg, Lexicon{}, opt), ContractError);
  d.features[0].values[0] = std::numeric_limits<double>::infinity();
  try {
    train_lr(d, cfg, Lexicon{}, {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("iteration") != std::string::npos);
  }
}

TEST_CASE("random policy") {
  SUBCASE("accept probability is the positive rate") {
    CHECK(fit_random_policy({1, 1, 1, 0}, 1).accept_prob() == 0.75);
    CHECK(fit_random_policy({1, 1}, 1).accept_prob() == 1.0);
    CHECK_THROWS_AS(fit_random_policy({}, 1), Error);
  }
  SUBCASE("seeded replay is identical") {
    const Instance inst = qfc::testing::make_instance(qfc::testing::chain(40, 1), {}, 1000);
    const CompressionState s(inst);
    RandomPolicy a(0.3, 42), b(0.3, 42);
    for (int i = 0; i < 200; ++i) CHECK(a.score(s, 1) == b.score(s, 1));
    a.reseed(5);
    b.reseed(5);
    CHECK(compress(inst, a) == compress(inst, b));
  }
  SUBCASE("draws are Bernoulli at the fitted rate") {
    const Instance inst = qfc::testing::make_instance(qfc::testing::chain(2, 1), {}, 1000);
    const CompressionState s(inst);
    RandomPolicy p(0.3, 7);
    int ones = 0;
    for (int i = 0; i < 100000; ++i) {
      const double x = p.score(s, 1);
      CHECK((x == 0.0 || x == 1.0));
      ones += x == 1.0;
    }
    CHECK(ones / 100000.0 == doctest::Approx(0.3).epsilon(0.02));
  }
}

TEST_CASE("grid search returns the best validation c") {
  const auto graphs = synthesize_sentences(150, 3);
  std::vector<Instance> train, valid;
  std::mt19937_64 rng(1);
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    auto g = std::make_shared<const ParseGraph>(graphs[i]);
    auto inst = build_instance(g, synthesize_gold(*g, rng), QueryLengthDist{}, rng);
    if (inst) (i % 3 ? train : valid).push_back(*inst);
  }
  const FeatureConfig cfg = FeatureConfig::full();
  std::vector<const ParseGraph*> ptrs;
  for (const Instance& inst : train) ptrs.push_back(inst.graph.get());
  const Lexicon lex = Lexicon::build(ptrs, cfg.lexical_vocab_cutoff);
  const TrainingSet data = build_training_set(train, cfg, lex);
  const GridResult r = grid_search_c(data, cfg, lex, valid);
  REQUIRE(r.f1.size() == 4);
  const auto best = std::max_element(r.f1.begin(), r.f1.end()) - r.f1.begin();
  CHECK(r.best_c == r.grid[static_cast<std::size_t>(best)]);

  // Independent recomputation of one grid point.
  LROptions opt;
  opt.c = r.grid[1];
  const LRModel m = train_lr(data, cfg, lex, opt);
  const LRDecisionModel dm(m);
  double sum = 0.0;
  for (const Instance& inst : valid) sum += token_f1(compress(inst, dm), *inst.gold).f1;
  CHECK(r.f1[1] == doctest::Approx(sum / static_cast<double>(valid.size())).epsilon(1e-12));
}
