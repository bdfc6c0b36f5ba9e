#pragma once

// Word n-gram language model (orders 1-3) with interpolated absolute
// discounting, stored in backoff form so it round-trips through ARPA text,
// and the SLOR readability score.
//
// Smoothing, with D = 0.75 and c(h) the count of context h:
//   P1(w)     = max(c(w) - D, 0) / N + (D * N1+(.) / N) / (|V| + 1)
//   Pk(w | h) = max(c(hw) - D, 0) / c(h) + (D * N1+(h.) / c(h)) * Pk-1(w | h')
// where V holds every observed word and </s>, and the extra slot is <unk>.
// All tokens are lowercased before counting and scoring.

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qfc {

class TrigramLM {
 public:
  static constexpr std::string_view kBos = "<s>";
  static constexpr std::string_view kEos = "</s>";
  static constexpr std::string_view kUnk = "<unk>";

  /// Throws Error on an empty corpus or an order outside 1..3.
  static TrigramLM train(const std::vector<std::vector<std::string>>& sentences, int order = 3,
                         double discount = 0.75);
  static TrigramLM from_arpa(std::string_view text);
  std::string to_arpa() const;

  int order() const noexcept { return order_; }
  double discount() const noexcept { return discount_; }
  /// Observed words plus </s> (excludes <s> and <unk>).
  std::size_t vocab_size() const noexcept { return vocab_.size(); }
  const std::vector<std::string>& vocab() const noexcept { return vocab_; }

  /// P(w | h1 h2), with h2 the word immediately before w. Use kBos for
  /// sentence-initial history. Unknown words map to <unk>.
  double prob(std::string_view word, std::string_view h1, std::string_view h2) const;
  /// P_u(w), the unigram distribution.
  double unigram_prob(std::string_view word) const;

  /// Natural-log probability of the sequence framed by <s> ... </s>.
  /// Throws Error on an empty sequence.
  double logprob(const std::vector<std::string>& seq) const;
  /// Like logprob but without the final </s> term.
  double token_logprob(const std::vector<std::string>& seq) const;
  /// (log P_m(ξ) - log P_u(ξ)) / |ξ| over the tokens of ξ; the boundary
  /// markers count neither in |ξ| nor in either probability.
  double slor(const std::vector<std::string>& seq) const;

 private:
  using Id = std::uint32_t;
  static constexpr Id kNone = 0xFFFFFFFFu;

  Id lookup(std::string_view w) const;
  Id intern(const std::string& w);
  double prob_ids(Id w, Id h1, Id h2) const;  // h1/h2 = kNone when absent
  double unigram_ids(Id w) const;
  static std::uint64_t key2(Id a, Id b) { return (std::uint64_t{a} << 32) | b; }
  static std::uint64_t key3(Id a, Id b, Id c) {
    return (std::uint64_t{a} << 42) | (std::uint64_t{b} << 21) | std::uint64_t{c};
  }

  int order_ = 3;
  double discount_ = 0.75;
  std::vector<std::string> words_;  // id -> word, includes <s>, </s>, <unk>
  std::unordered_map<std::string, Id> ids_;
  std::vector<std::string> vocab_;
  Id bos_ = 0, eos_ = 0, unk_ = 0;

  // Backoff tables: final probabilities for seen n-grams and backoff
  // weights for contexts.
  std::vector<double> p1_;    // by id
  std::vector<double> bow1_;  // by id
  std::unordered_map<std::uint64_t, double> p2_, bow2_, p3_;
};

/// Lowercases tokens and splits on single spaces.
std::vector<std::string> lm_tokens(std::string_view text);

}  // namespace qfc
