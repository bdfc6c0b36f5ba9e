#include <doctest.h>

#include <cmath>

#include "qfc/error.hpp"
#include "qfc/lm.hpp"

using namespace qfc;

namespace {

using Sent = std::vector<std::string>;

TrigramLM cat_lm(int order = 3) { return TrigramLM::train({{"the", "cat", "sat"}, {"the", "cat", "ran"}}, order); }

double total_mass(const TrigramLM& lm, const std::string& h1, const std::string& h2) {
  double sum = lm.prob("<unk>", h1, h2);
  for (const std::string& w : lm.vocab()) sum += lm.prob(w, h1, h2);
  return sum;
}

}  // namespace

// Expected values come from tests/oracles/lm_oracle.py (exact rationals).
TEST_CASE("probabilities match the exact oracle") {
  const TrigramLM lm = cat_lm();
  CHECK(lm.vocab_size() == 5);
  CHECK(lm.prob("sat", "the", "cat") == doctest::Approx(0.2802734375).epsilon(1e-12));
  CHECK(lm.prob("ran", "the", "cat") == doctest::Approx(0.2802734375).epsilon(1e-12));
  CHECK(lm.prob("the", "", "<s>") == doctest::Approx(0.712890625).epsilon(1e-12));
  CHECK(lm.unigram_prob("the") == doctest::Approx(0.234375).epsilon(1e-12));
  CHECK(lm.unigram_prob("<unk>") == doctest::Approx(0.078125).epsilon(1e-12));
  CHECK(lm.unigram_prob("dog") == doctest::Approx(0.078125).epsilon(1e-12));
  CHECK(lm.prob("dog", "the", "cat") == doctest::Approx(0.0439453125).epsilon(1e-12));
  CHECK(lm.logprob({"the", "cat", "sat"}) == doctest::Approx(-2.2876162750812736).epsilon(1e-12));
  CHECK(lm.slor({"the", "cat", "sat"}) == doctest::Approx(1.130102347662323).epsilon(1e-12));
  CHECK(lm.logprob({"cat", "the", "dog"}) == doctest::Approx(-9.15128439617319).epsilon(1e-12));
  CHECK(lm.slor({"cat", "the", "dog"}) == doctest::Approx(-0.749780192825078).epsilon(1e-12));
}

TEST_CASE("second corpus with repeated words") {
  const TrigramLM lm = TrigramLM::train({{"a", "b", "a"}, {"b", "b"}, {"a"}});
  CHECK(lm.logprob({"a", "b", "b"}) == doctest::Approx(-3.8966509115088486).epsilon(1e-12));
  CHECK(lm.logprob({"b", "a", "a"}) == doctest::Approx(-5.5641526248977105).epsilon(1e-12));
  CHECK(lm.prob("a", "a", "b") == doctest::Approx(0.48828125).epsilon(1e-12));
  CHECK(lm.prob("</s>", "b", "a") == doctest::Approx(0.6796875).epsilon(1e-12));
}

TEST_CASE("conditional distributions sum to one") {
  const TrigramLM lm = TrigramLM::train({{"a", "b", "c", "a"},
                                         {"b", "c", "c"},
                                         {"the", "a", "b", "d"},
                                         {"d", "d", "a", "the"},
                                         {"c"}});
  std::vector<std::string> ctx = lm.vocab();
  ctx.push_back("<s>");
  ctx.push_back("zzz");
  int checked = 0;
  for (const std::string& h1 : ctx) {
    for (const std::string& h2 : ctx) {
      if (h2 == "</s>" || h1 == "</s>") continue;
      CHECK(total_mass(lm, h1, h2) == doctest::Approx(1.0).epsilon(1e-12));
      ++checked;
    }
    if (h1 != "</s>") {
      CHECK(total_mass(lm, "", h1) == doctest::Approx(1.0).epsilon(1e-12));
      ++checked;
    }
  }
  CHECK(checked >= 50);
  double uni = lm.unigram_prob("<unk>");
  for (const std::string& w : lm.vocab()) uni += lm.unigram_prob(w);
  CHECK(uni == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("case is folded before counting and scoring") {
  const TrigramLM lm = TrigramLM::train({{"The", "Cat", "sat"}, {"the", "cat", "RAN"}});
  const TrigramLM ref = cat_lm();
  CHECK(lm.vocab_size() == ref.vocab_size());
  CHECK(lm.logprob({"THE", "cat", "Sat"}) == doctest::Approx(ref.logprob({"the", "cat", "sat"})).epsilon(1e-15));
  CHECK(lm_tokens("The Cat  sat") == Sent{"the", "cat", "sat"});
}

TEST_CASE("SLOR") {
  SUBCASE("a unigram model has SLOR zero everywhere") {
    const TrigramLM lm = cat_lm(1);
    CHECK(lm.slor({"the", "cat", "sat"}) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(lm.slor({"dog"}) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  }
  SUBCASE("identity with per-token log probabilities") {
    const TrigramLM lm = cat_lm();
    const Sent s = {"cat", "sat", "the"};
    double lu = 0.0;
    for (const auto& w : s) lu += std::log(lm.unigram_prob(w));
    CHECK(lm.slor(s) == doctest::Approx((lm.token_logprob(s) - lu) / 3.0).epsilon(1e-14));
    CHECK(lm.logprob(s) == doctest::Approx(lm.token_logprob(s) + std::log(lm.prob("</s>", "sat", "the"))).epsilon(1e-14));
  }
  SUBCASE("fluent order beats scrambled order") {
    const TrigramLM lm = cat_lm();
    CHECK(lm.slor({"the", "cat", "sat"}) > lm.slor({"sat", "the", "cat"}));
  }
}

TEST_CASE("ARPA round trip") {
  for (int order : {1, 2, 3}) {
    const TrigramLM lm = TrigramLM::train({{"a", "b", "c", "a"}, {"b", "c", "c"}, {"the", "a", "b"}}, order);
    const std::string text = lm.to_arpa();
    CHECK(text.find("\\data\\") == 0);
    const TrigramLM back = TrigramLM::from_arpa(text);
    CHECK(back.order() == order);
    CHECK(back.vocab_size() == lm.vocab_size());
    for (const Sent& s : {Sent{"a", "b", "c"}, Sent{"c", "the", "x"}, Sent{"b"}}) {
      CHECK(back.logprob(s) == doctest::Approx(lm.logprob(s)).epsilon(1e-8));
      CHECK(back.slor(s) == doctest::Approx(lm.slor(s)).epsilon(1e-8).scale(1.0));
    }
    CHECK(back.to_arpa() == text);
  }
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(TrigramLM::train({}), Error);
  CHECK_THROWS_AS(TrigramLM::train({{}}), Error);
  CHECK_THROWS_AS(TrigramLM::train({{"a"}}, 4), Error);
  CHECK_THROWS_AS(TrigramLM::train({{"a"}}, 3, 1.0), Error);
  const TrigramLM lm = cat_lm();
  CHECK_THROWS_AS(lm.logprob({}), Error);
  CHECK_THROWS_AS(lm.slor({}), Error);
  CHECK_THROWS_AS(TrigramLM::from_arpa("\\data\\\nngram 1=1\n"), ParseError);
  CHECK_THROWS_AS(TrigramLM::from_arpa("\\data\\\nngram 1=1\n\n\\1-grams:\n-1 a b c d\n\\end\\\n"), ParseError);
}
