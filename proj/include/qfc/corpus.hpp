#pragma once

// Parsed source sentences, compression instances, and the canonical
// left-to-right linearization used for every character-length check.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qfc {

/// Sentence position. Tokens are 1..n; 0 is the synthetic root.
using Position = int;
inline constexpr Position kRoot = 0;

/// Ascending, duplicate-free list of token positions.
using VertexSet = std::vector<Position>;

/// Sorts and deduplicates in place.
void normalize(VertexSet& verts);
bool contains(const VertexSet& sorted_verts, Position v);
bool is_subset(const VertexSet& sub, const VertexSet& super);

struct Token {
  Position position = 0;
  std::string form;
  std::string lemma;
  std::string upos;
  int char_len = 0;  // code points in form
};

enum class EdgeOrigin : std::uint8_t { tree, root_augmented };

struct DepEdge {
  Position head = kRoot;
  Position child = 0;
  std::string label;
  EdgeOrigin origin = EdgeOrigin::tree;

  friend bool operator==(const DepEdge&, const DepEdge&) = default;
};

/// Dependency tree of one sentence plus the optional root-augmented edges
/// the ILP baseline needs. Immutable once built; structural lookups
/// (parent, children, depth) are precomputed so per-vertex queries are O(1).
class ParseGraph {
 public:
  /// Validates that `tree_edges` form a single tree rooted at 0 covering
  /// every token. Throws ParseError on violation.
  static ParseGraph build(std::string id, std::vector<Token> tokens, std::vector<DepEdge> tree_edges);

  const std::string& id() const noexcept { return id_; }
  int size() const noexcept { return static_cast<int>(tokens_.size()); }
  const std::vector<Token>& tokens() const noexcept { return tokens_; }
  const Token& token(Position v) const { return tokens_[static_cast<std::size_t>(v - 1)]; }
  const std::vector<DepEdge>& tree_edges() const noexcept { return tree_edges_; }
  const std::vector<DepEdge>& aug_edges() const noexcept { return aug_edges_; }
  bool transformed() const noexcept { return transformed_; }

  Position parent(Position v) const { return parent_[static_cast<std::size_t>(v)]; }
  /// Label of the tree edge governing v.
  const std::string& parent_label(Position v) const;
  std::span<const Position> children(Position v) const;
  /// Tree-edge neighbors of v (parent unless root, then children), no root.
  std::span<const Position> neighbors(Position v) const;
  /// Distance from the synthetic root: direct root dependents have depth 1.
  int depth(Position v) const { return depth_[static_cast<std::size_t>(v)]; }
  bool has_punct_child(Position v) const { return punct_child_[static_cast<std::size_t>(v)] != 0; }
  /// True iff v carries a root-augmented incoming edge.
  bool has_aug_edge(Position v) const;
  /// Sum of char_len over all tokens plus separating spaces.
  int char_len() const noexcept { return total_len_; }

 private:
  friend ParseGraph transform_root_edges(const ParseGraph& g);
  friend ParseGraph relabel_function_edges(const ParseGraph& g);

  void index();

  std::string id_;
  std::vector<Token> tokens_;
  std::vector<DepEdge> tree_edges_;  // ordered by child position
  std::vector<DepEdge> aug_edges_;
  bool transformed_ = false;

  std::vector<Position> parent_;     // [0..n], parent_[0] = -1
  std::vector<int> depth_;
  std::vector<std::uint8_t> punct_child_;
  std::vector<int> child_offsets_;   // CSR over children_
  std::vector<Position> children_;
  std::vector<int> nbr_offsets_;
  std::vector<Position> nbrs_;
  int total_len_ = 0;
};

/// (S, Q, b, optional gold): one constrained-compression problem.
struct Instance {
  std::string id;
  std::shared_ptr<const ParseGraph> graph;
  VertexSet query;
  int budget = 0;
  std::optional<VertexSet> gold;
  std::string split;  // "train", "test", or empty when untagged

  /// Throws ContractError when Q or gold fall outside the sentence, gold
  /// misses Q, or budget < 1.
  void validate() const;
};

// ---------------------------------------------------------------------------
// CoNLL-U

/// One ParseGraph per sentence. Multiword ranges and empty nodes are
/// skipped; LEMMA "_" falls back to the lowercased FORM.
std::vector<ParseGraph> parse_conllu(std::string_view text);
std::string serialize_conllu(std::span<const ParseGraph> graphs);

// ---------------------------------------------------------------------------
// Transforms

/// Adds one root_aug edge (0, v) for every token not already governed by
/// the root. Throws ContractError if the graph was already transformed.
ParseGraph transform_root_edges(const ParseGraph& g);

/// Suffixes modifier and conjunct labels with the lemma of their case/cc
/// function word, e.g. nmod -> nmod:in, conj -> conj:and.
ParseGraph relabel_function_edges(const ParseGraph& g);

// ---------------------------------------------------------------------------
// Linearization

struct Linearization {
  std::string text;
  int char_len = 0;
};

/// Tokens in ascending position joined by single spaces.
Linearization linearize(const ParseGraph& g, const VertexSet& verts);
/// char_len of linearize() without building the string.
int linear_length(const ParseGraph& g, const VertexSet& verts);

/// Code points in a UTF-8 string.
int utf8_length(std::string_view s);
std::string ascii_lower(std::string_view s);

}  // namespace qfc
