#include <charconv>
#include <sstream>

#include "qfc/corpus.hpp"
#include "qfc/error.hpp"

namespace qfc {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return cols;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

struct PendingSentence {
  std::string id;
  std::vector<Token> tokens;
  std::vector<DepEdge> edges;
  std::vector<int> lines;  // source line per token
  int first_line = 0;

  void clear() { *this = PendingSentence{}; }
  bool empty() const { return tokens.empty(); }
};

ParseGraph finish(PendingSentence& s, int index) {
  const int n = static_cast<int>(s.tokens.size());
  for (std::size_t i = 0; i < s.edges.size(); ++i)
    if (s.edges[i].head > n)
      throw ParseError("HEAD " + std::to_string(s.edges[i].head) + " out of range for " + std::to_string(n) + "-token sentence", s.lines[i]);
  std::string id = s.id.empty() ? "s" + std::to_string(index + 1) : s.id;
  try {
    return ParseGraph::build(std::move(id), std::move(s.tokens), std::move(s.edges));
  } catch (const ParseError& e) {
    throw ParseError(e.what(), s.first_line);
  }
}

}  // namespace

std::vector<ParseGraph> parse_conllu(std::string_view text) {
  std::vector<ParseGraph> out;
  PendingSentence cur;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      if (!cur.empty()) out.push_back(finish(cur, static_cast<int>(out.size())));
      cur.clear();
      if (nl == text.size()) break;
      continue;
    }
    if (line.front() == '#') {
      constexpr std::string_view kSentId = "# sent_id = ";
      if (line.starts_with(kSentId)) cur.id = std::string(line.substr(kSentId.size()));
      continue;
    }

    const auto cols = split_tabs(line);
    if (cols.size() != 10)
      throw ParseError("expected 10 tab-separated columns, found " + std::to_string(cols.size()), line_no);
    const std::string_view id = cols[0];
    if (id.find('-') != std::string_view::npos || id.find('.') != std::string_view::npos) continue;

    int position = 0;
    if (!parse_int(id, position) || position != static_cast<int>(cur.tokens.size()) + 1)
      throw ParseError("token ID '" + std::string(id) + "' is not the next position", line_no);
    int head = 0;
    if (!parse_int(cols[6], head) || head < 0) throw ParseError("bad HEAD '" + std::string(cols[6]) + "'", line_no);
    if (cols[1].empty()) throw ParseError("empty FORM", line_no);
    if (cur.empty()) cur.first_line = line_no;

    Token t;
    t.position = position;
    t.form = std::string(cols[1]);
    t.lemma = cols[2] == "_" && cols[1] != "_" ? ascii_lower(cols[1]) : std::string(cols[2]);
    t.upos = std::string(cols[3]);
    cur.tokens.push_back(std::move(t));
    cur.edges.push_back({head, position, std::string(cols[7]), EdgeOrigin::tree});
    cur.lines.push_back(line_no);
    if (nl == text.size()) break;
  }
  if (!cur.empty()) out.push_back(finish(cur, static_cast<int>(out.size())));
  return out;
}

std::string serialize_conllu(std::span<const ParseGraph> graphs) {
  std::ostringstream os;
  for (const ParseGraph& g : graphs) {
    os << "# sent_id = " << g.id() << '\n';
    for (const Token& t : g.tokens()) {
      os << t.position << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << "\t_\t_\t" << g.parent(t.position)
         << '\t' << g.parent_label(t.position) << "\t_\t_\n";
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace qfc
