#include "qfc/corpus.hpp"

#include <algorithm>
#include <unordered_set>

#include "qfc/error.hpp"

namespace qfc {

namespace {

bool is_function_label(std::string_view label) { return label == "case" || label == "cc"; }

// Bases that take a function-word suffix when one of their dependents is a
// case marker or coordinating conjunction.
bool takes_suffix(std::string_view label) {
  static constexpr std::string_view kBases[] = {"nmod", "obl", "acl", "advcl", "conj"};
  return std::find(std::begin(kBases), std::end(kBases), label) != std::end(kBases);
}

}  // namespace

void normalize(VertexSet& verts) {
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
}

bool contains(const VertexSet& sorted_verts, Position v) {
  return std::binary_search(sorted_verts.begin(), sorted_verts.end(), v);
}

bool is_subset(const VertexSet& sub, const VertexSet& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

int utf8_length(std::string_view s) {
  int n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

// ---------------------------------------------------------------------------

ParseGraph ParseGraph::build(std::string id, std::vector<Token> tokens, std::vector<DepEdge> tree_edges) {
  const int n = static_cast<int>(tokens.size());
  for (int i = 0; i < n; ++i) {
    Token& t = tokens[static_cast<std::size_t>(i)];
    if (t.position != i + 1) throw ParseError("token positions must be contiguous from 1", 0);
    if (t.form.empty()) throw ParseError("empty token form at position " + std::to_string(i + 1), 0);
    t.char_len = utf8_length(t.form);
  }
  if (static_cast<int>(tree_edges.size()) != n)
    throw ParseError("expected one tree edge per token, got " + std::to_string(tree_edges.size()), 0);

  std::vector<int> seen(static_cast<std::size_t>(n + 1), 0);
  int roots = 0;
  for (const DepEdge& e : tree_edges) {
    if (e.origin != EdgeOrigin::tree) throw ParseError("non-tree edge passed as tree edge", 0);
    if (e.child < 1 || e.child > n || e.head < 0 || e.head > n)
      throw ParseError("edge endpoint out of range", 0);
    if (e.head == e.child) throw ParseError("self-loop at token " + std::to_string(e.child), 0);
    if (seen[static_cast<std::size_t>(e.child)]++)
      throw ParseError("token " + std::to_string(e.child) + " has two heads", 0);
    roots += e.head == kRoot;
  }
  if (n > 0 && roots != 1) throw ParseError("expected exactly one root dependent, got " + std::to_string(roots), 0);

  std::sort(tree_edges.begin(), tree_edges.end(),
            [](const DepEdge& a, const DepEdge& b) { return a.child < b.child; });

  ParseGraph g;
  g.id_ = std::move(id);
  g.tokens_ = std::move(tokens);
  g.tree_edges_ = std::move(tree_edges);
  g.index();
  return g;
}

void ParseGraph::index() {
  const int n = size();
  const auto sz = static_cast<std::size_t>(n + 1);
  parent_.assign(sz, -1);
  for (const DepEdge& e : tree_edges_) parent_[static_cast<std::size_t>(e.child)] = e.head;

  // Depth by walking up with memoization; also catches cycles.
  depth_.assign(sz, -1);
  depth_[0] = 0;
  std::vector<Position> path;
  for (Position v = 1; v <= n; ++v) {
    path.clear();
    Position u = v;
    while (depth_[static_cast<std::size_t>(u)] < 0) {
      if (static_cast<int>(path.size()) > n) throw ParseError("dependency cycle through token " + std::to_string(v), 0);
      path.push_back(u);
      u = parent_[static_cast<std::size_t>(u)];
    }
    int d = depth_[static_cast<std::size_t>(u)];
    for (auto it = path.rbegin(); it != path.rend(); ++it) depth_[static_cast<std::size_t>(*it)] = ++d;
  }

  child_offsets_.assign(sz + 1, 0);
  for (const DepEdge& e : tree_edges_) ++child_offsets_[static_cast<std::size_t>(e.head) + 1];
  for (std::size_t i = 1; i < child_offsets_.size(); ++i) child_offsets_[i] += child_offsets_[i - 1];
  children_.assign(tree_edges_.size(), 0);
  {
    std::vector<int> fill(child_offsets_.begin(), child_offsets_.end() - 1);
    for (const DepEdge& e : tree_edges_) children_[static_cast<std::size_t>(fill[static_cast<std::size_t>(e.head)]++)] = e.child;
  }

  nbr_offsets_.assign(sz + 1, 0);
  nbrs_.clear();
  for (Position v = 0; v <= n; ++v) {
    nbr_offsets_[static_cast<std::size_t>(v)] = static_cast<int>(nbrs_.size());
    if (v > 0) {
      const Position p = parent_[static_cast<std::size_t>(v)];
      // Children are already sorted by position; insert the parent in order.
      auto ch = children(v);
      bool placed = p == kRoot;
      for (Position c : ch) {
        if (!placed && p < c) {
          nbrs_.push_back(p);
          placed = true;
        }
        nbrs_.push_back(c);
      }
      if (!placed) nbrs_.push_back(p);
    }
  }
  nbr_offsets_[sz] = static_cast<int>(nbrs_.size());

  punct_child_.assign(sz, 0);
  for (const DepEdge& e : tree_edges_)
    if (e.label == "punct") punct_child_[static_cast<std::size_t>(e.head)] = 1;

  total_len_ = 0;
  for (const Token& t : tokens_) total_len_ += t.char_len;
  if (n > 1) total_len_ += n - 1;
}

const std::string& ParseGraph::parent_label(Position v) const { return tree_edges_[static_cast<std::size_t>(v - 1)].label; }

std::span<const Position> ParseGraph::children(Position v) const {
  const auto b = static_cast<std::size_t>(child_offsets_[static_cast<std::size_t>(v)]);
  const auto e = static_cast<std::size_t>(child_offsets_[static_cast<std::size_t>(v) + 1]);
  return {children_.data() + b, e - b};
}

std::span<const Position> ParseGraph::neighbors(Position v) const {
  const auto b = static_cast<std::size_t>(nbr_offsets_[static_cast<std::size_t>(v)]);
  const auto e = static_cast<std::size_t>(nbr_offsets_[static_cast<std::size_t>(v) + 1]);
  return {nbrs_.data() + b, e - b};
}

bool ParseGraph::has_aug_edge(Position v) const { return transformed_ && parent(v) != kRoot; }

// ---------------------------------------------------------------------------

void Instance::validate() const {
  if (!graph) throw ContractError("instance " + id + " has no graph");
  const int n = graph->size();
  auto in_range = [n](const VertexSet& s) {
    return std::is_sorted(s.begin(), s.end()) && std::adjacent_find(s.begin(), s.end()) == s.end() &&
           std::all_of(s.begin(), s.end(), [n](Position v) { return v >= 1 && v <= n; });
  };
  if (!in_range(query)) throw ContractError("instance " + id + ": query positions invalid");
  if (budget < 1) throw ContractError("instance " + id + ": budget must be >= 1");
  if (gold) {
    if (!in_range(*gold)) throw ContractError("instance " + id + ": gold positions invalid");
    if (!is_subset(query, *gold)) throw ContractError("instance " + id + ": query not contained in gold");
  }
}

// ---------------------------------------------------------------------------

ParseGraph transform_root_edges(const ParseGraph& g) {
  if (g.transformed_) throw ContractError("graph " + g.id() + " already has root-augmented edges");
  ParseGraph out = g;
  out.transformed_ = true;
  for (const Token& t : g.tokens())
    if (g.parent(t.position) != kRoot)
      out.aug_edges_.push_back({kRoot, t.position, "root_aug", EdgeOrigin::root_augmented});
  return out;
}

ParseGraph relabel_function_edges(const ParseGraph& g) {
  ParseGraph out = g;
  for (DepEdge& e : out.tree_edges_) {
    if (!takes_suffix(e.label)) continue;
    for (Position c : g.children(e.child)) {
      const std::string& lab = g.parent_label(c);
      if (is_function_label(lab)) {
        e.label += ':';
        e.label += ascii_lower(g.token(c).lemma);
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Linearization linearize(const ParseGraph& g, const VertexSet& verts) {
  Linearization out;
  for (Position v : verts) {
    if (!out.text.empty()) out.text += ' ';
    out.text += g.token(v).form;
  }
  out.char_len = linear_length(g, verts);
  return out;
}

int linear_length(const ParseGraph& g, const VertexSet& verts) {
  if (verts.empty()) return 0;
  int len = static_cast<int>(verts.size()) - 1;
  for (Position v : verts) len += g.token(v).char_len;
  return len;
}

}  // namespace qfc
