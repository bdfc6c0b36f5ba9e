#pragma once

// Search snippets: boolean AND retrieval over a case-folded token index,
// then one budgeted compression per matching sentence.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "qfc/eval.hpp"

namespace qfc {

class InvertedIndex {
 public:
  /// Throws ContractError on a duplicate sentence id.
  static InvertedIndex build(std::vector<std::shared_ptr<const ParseGraph>> graphs);

  std::size_t size() const noexcept { return graphs_.size(); }
  const ParseGraph& graph(std::size_t doc) const { return *graphs_[doc]; }
  std::shared_ptr<const ParseGraph> graph_ptr(std::size_t doc) const { return graphs_[doc]; }
  /// Ascending document numbers containing the lowercased term; empty if absent.
  const std::vector<std::size_t>& postings(const std::string& term) const;
  std::size_t vocabulary_size() const noexcept { return postings_.size(); }

 private:
  std::vector<std::shared_ptr<const ParseGraph>> graphs_;
  std::unordered_map<std::string, std::vector<std::size_t>> postings_;
};

struct Snippet {
  std::string sentence_id;
  std::string text;
  int char_len = 0;
  std::string engine;
  double latency_ms = 0.0;
};

struct Skipped {
  std::string sentence_id;
  std::string reason;
};

struct SearchResult {
  std::vector<std::string> terms;  // lowercased, duplicates removed
  int budget = 0;
  std::vector<Snippet> snippets;
  std::vector<Skipped> skipped;
  double total_ms = 0.0;
};

using EngineMap = std::map<std::string, System>;

/// Candidates are the sentences containing every term, shortest source
/// first (ties by id); Q is the first occurrence of each term. Sentences
/// whose Q alone exceeds b are skipped with a reason. Throws ContractError
/// for an unknown engine, k < 1 or b < 1.
SearchResult search(const InvertedIndex& index, const std::vector<std::string>& terms, int budget, int k,
                    const std::string& engine, const EngineMap& engines);

/// Checks Q ⊆ text tokens and char_len ≤ b independently of the engine;
/// returns a description of the first violation or "".
std::string check_snippet(const Snippet& s, const std::vector<std::string>& terms, int budget);

nlohmann::json search_result_to_json(const SearchResult& r);

/// Splits a query string on whitespace.
std::vector<std::string> split_terms(std::string_view q);

/// HTTP front end: GET /search?q=&b=&k=&engine=, /healthz, /engines.
class SnippetServer {
 public:
  SnippetServer(const InvertedIndex& index, const EngineMap& engines);
  ~SnippetServer();
  SnippetServer(const SnippetServer&) = delete;
  SnippetServer& operator=(const SnippetServer&) = delete;

  /// Binds host:port (0 picks a free port) and returns the bound port.
  /// Throws Error when the port cannot be bound.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace qfc
