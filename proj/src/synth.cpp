// Grammar-driven generator of parsed news-style sentences with UD labels,
// and the headline-style gold selector used for desk-scale corpora.

#include <array>
#include <string_view>

#include "qfc/datagen.hpp"
#include "qfc/eval.hpp"

namespace qfc {

namespace {

struct Verb {
  std::string_view lemma, past, participle;
};

constexpr std::array<std::string_view, 64> kNouns = {
    "official", "council",  "police",   "company", "government", "minister", "report",   "plan",
    "school",   "hospital", "market",   "price",   "player",     "team",     "club",     "manager",
    "court",    "judge",    "study",    "fire",    "storm",      "bank",     "city",     "village",
    "farmer",   "worker",   "union",    "strike",  "election",   "vote",     "tax",      "budget",
    "museum",   "painting", "festival", "road",    "bridge",     "train",    "airport",  "flight",
    "doctor",   "patient",  "teacher",  "student", "scientist",  "virus",    "drug",     "trial",
    "factory",  "energy",   "water",    "river",   "forest",     "animal",   "zoo",      "deal",
    "contract", "record",   "season",   "coach",   "fan",        "stadium",  "concert",  "album"};

constexpr std::array<std::string_view, 24> kNames = {
    "Syracuse", "NHS",    "QPR",    "Hughes",    "Smith",  "London",  "Paris",  "Berlin",
    "Google",   "Apple",  "Texas",  "Ohio",      "Madrid", "Chelsea", "Arsenal", "Microsoft",
    "BBC",      "Toyota", "Kenya",  "New York",  "John Smith", "Mary Jones", "South Africa", "Real Madrid"};

constexpr std::array<Verb, 26> kTransitive = {{{"announce", "announced", "announced"},
                                               {"approve", "approved", "approved"},
                                               {"reject", "rejected", "rejected"},
                                               {"sign", "signed", "signed"},
                                               {"win", "won", "won"},
                                               {"lose", "lost", "lost"},
                                               {"buy", "bought", "bought"},
                                               {"sell", "sold", "sold"},
                                               {"open", "opened", "opened"},
                                               {"close", "closed", "closed"},
                                               {"launch", "launched", "launched"},
                                               {"build", "built", "built"},
                                               {"arrest", "arrested", "arrested"},
                                               {"ban", "banned", "banned"},
                                               {"criticize", "criticized", "criticized"},
                                               {"praise", "praised", "praised"},
                                               {"raise", "raised", "raised"},
                                               {"cut", "cut", "cut"},
                                               {"hire", "hired", "hired"},
                                               {"visit", "visited", "visited"},
                                               {"defeat", "defeated", "defeated"},
                                               {"release", "released", "released"},
                                               {"acquire", "acquired", "acquired"},
                                               {"plan", "planned", "planned"},
                                               {"support", "supported", "supported"},
                                               {"investigate", "investigated", "investigated"}}};

constexpr std::array<Verb, 8> kIntransitive = {{{"resign", "resigned", "resigned"},
                                                {"die", "died", "died"},
                                                {"collapse", "collapsed", "collapsed"},
                                                {"rise", "rose", "risen"},
                                                {"fall", "fell", "fallen"},
                                                {"arrive", "arrived", "arrived"},
                                                {"retire", "retired", "retired"},
                                                {"protest", "protested", "protested"}}};

constexpr std::array<std::string_view, 20> kAdjectives = {
    "new",   "local",  "former", "major",   "big",     "small",         "young",   "old",    "national", "public",
    "private", "first", "last",  "annual",  "popular", "controversial", "rare",    "senior", "leading",  "top"};

constexpr std::array<std::string_view, 7> kAdverbs = {"reportedly", "finally", "quickly", "also",
                                                      "again",      "recently", "officially"};
constexpr std::array<std::string_view, 11> kPreps = {"in",   "on",   "at",     "for",    "with",   "after",
                                                     "near", "from", "over",   "during", "against"};
constexpr std::array<std::string_view, 5> kDets = {"the", "a", "this", "its", "their"};
constexpr std::array<std::string_view, 5> kNumbers = {"two", "three", "10", "500", "five"};
constexpr std::array<std::string_view, 4> kSubordinators = {"after", "because", "as", "while"};
constexpr std::array<std::string_view, 4> kTimes = {"Monday", "Friday", "Tuesday", "Sunday"};

struct Node {
  std::string form;
  std::string lemma;
  std::string upos;
  int head = -1;  // index into nodes, -1 = root
  std::string label;
};

class SentenceBuilder {
 public:
  explicit SentenceBuilder(std::mt19937_64& rng) : rng_(rng) {}

  ParseGraph build(std::string id) {
    clause_root();
    std::vector<Token> tokens;
    std::vector<DepEdge> edges;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      const Position pos = static_cast<Position>(i + 1);
      tokens.push_back({pos, n.form, n.lemma, n.upos, 0});
      edges.push_back({n.head < 0 ? kRoot : n.head + 1, pos, n.label, EdgeOrigin::tree});
    }
    return ParseGraph::build(std::move(id), std::move(tokens), std::move(edges));
  }

 private:
  bool chance(double p) { return uniform01(rng_) < p; }
  template <class Arr>
  const auto& pick(const Arr& a) {
    return a[uniform_below(rng_(), a.size())];
  }

  int add(std::string_view form, std::string_view lemma, std::string_view upos) {
    nodes_.push_back({std::string(form), std::string(lemma), std::string(upos), -1, ""});
    return static_cast<int>(nodes_.size()) - 1;
  }
  void attach(int child, int head, std::string_view label) {
    nodes_[static_cast<std::size_t>(child)].head = head;
    nodes_[static_cast<std::size_t>(child)].label = std::string(label);
  }
  static std::string capitalize(std::string_view s) {
    std::string out(s);
    if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
    return out;
  }

  // Returns the head node of a proper name; multiword names use flat.
  int name() {
    const std::string_view n = pick(kNames);
    const std::size_t sp = n.find(' ');
    if (sp == std::string_view::npos) return add(n, ascii_lower(n), "PROPN");
    const int head = add(n.substr(0, sp), ascii_lower(n.substr(0, sp)), "PROPN");
    const int tail = add(n.substr(sp + 1), ascii_lower(n.substr(sp + 1)), "PROPN");
    attach(tail, head, "flat");
    return head;
  }

  int noun_phrase(int depth = 0) {
    if (chance(0.3)) return name();
    std::vector<std::pair<int, std::string_view>> pre;
    if (chance(0.7)) pre.push_back({add(pick(kDets), "", "DET"), "det"});
    if (chance(0.1)) pre.push_back({add(pick(kNumbers), "", "NUM"), "nummod"});
    if (chance(0.4)) pre.push_back({add(pick(kAdjectives), "", "ADJ"), "amod"});
    if (chance(0.15)) pre.push_back({add(pick(kAdjectives), "", "ADJ"), "amod"});
    if (chance(0.25)) pre.push_back({add(pick(kNouns), "", "NOUN"), "compound"});
    const std::string_view n = pick(kNouns);
    const int head = add(n, n, "NOUN");
    for (auto& [idx, label] : pre) {
      Node& nd = nodes_[static_cast<std::size_t>(idx)];
      if (nd.lemma.empty()) nd.lemma = ascii_lower(nd.form);
      attach(idx, head, label);
    }
    if (depth < 2 && chance(0.25)) attach(prep_phrase(depth + 1), head, "nmod");
    if (depth < 1 && chance(0.08)) {
      const int cc = add("and", "and", "CCONJ");
      const int other = noun_phrase(depth + 1);
      attach(cc, other, "cc");
      attach(other, head, "conj");
    }
    return head;
  }

  int prep_phrase(int depth) {
    const std::string_view p = pick(kPreps);
    const int c = add(p, p, "ADP");
    const int np = noun_phrase(depth);
    attach(c, np, "case");
    return np;
  }

  int time_phrase() {
    const int c = add("on", "on", "ADP");
    const std::string_view t = pick(kTimes);
    const int np = add(t, ascii_lower(t), "PROPN");
    attach(c, np, "case");
    return np;
  }

  // Subject, verb group and complements of one clause; returns the verb.
  int clause_body(bool allow_relcl) {
    const int subj = noun_phrase();
    if (allow_relcl && chance(0.12)) {
      const int comma = add(",", ",", "PUNCT");
      const bool person = nodes_[static_cast<std::size_t>(subj)].upos == "PROPN";
      const std::string_view pron = person ? "who" : "which";
      const int rel = add(pron, pron, "PRON");
      const Verb& v = pick(kTransitive);
      const int verb = add(v.past, v.lemma, "VERB");
      attach(rel, verb, "nsubj");
      attach(noun_phrase(1), verb, "obj");
      attach(verb, subj, "acl:relcl");
      attach(comma, verb, "punct");
      attach(add(",", ",", "PUNCT"), verb, "punct");
    }

    const bool transitive = chance(0.75);
    const Verb& v = transitive ? pick(kTransitive) : pick(kIntransitive);
    std::vector<std::pair<int, std::string_view>> pre;
    bool participle = false;
    if (chance(0.3)) {
      const bool perfect = chance(0.6);
      pre.push_back({add(perfect ? "has" : "will", perfect ? "have" : "will", "AUX"), "aux"});
      participle = perfect;
      if (chance(0.25)) pre.push_back({add("not", "not", "PART"), "advmod"});
    }
    if (chance(0.15)) {
      const std::string_view a = pick(kAdverbs);
      pre.push_back({add(a, a, "ADV"), "advmod"});
    }
    const bool base = !pre.empty() && nodes_[static_cast<std::size_t>(pre.front().first)].form == "will";
    const std::string_view form = base ? v.lemma : participle ? v.participle : v.past;
    const int verb = add(form, v.lemma, "VERB");
    attach(subj, verb, "nsubj");
    for (auto& [idx, label] : pre) attach(idx, verb, label);
    if (transitive) attach(noun_phrase(), verb, "obj");
    if (chance(0.45)) attach(prep_phrase(0), verb, "obl");
    if (chance(0.2)) attach(prep_phrase(1), verb, "obl");
    if (chance(0.15)) attach(time_phrase(), verb, "obl");
    return verb;
  }

  void clause_root() {
    int intro = -1;
    int intro_comma = -1;
    std::string_view intro_label;
    if (chance(0.2)) {
      if (chance(0.5)) {
        const std::string_view a = pick(kAdverbs);
        intro = add(capitalize(a), a, "ADV");
        intro_label = "advmod";
      } else {
        intro = prep_phrase(1);
        intro_label = "obl";
      }
      intro_comma = add(",", ",", "PUNCT");
    }

    int root = -1;
    if (chance(0.15)) {
      // "<subj> said (that) <clause>"
      const int subj = noun_phrase();
      root = add("said", "say", "VERB");
      attach(subj, root, "nsubj");
      int mark = chance(0.5) ? add("that", "that", "SCONJ") : -1;
      const int inner = clause_body(false);
      if (mark >= 0) attach(mark, inner, "mark");
      attach(inner, root, "ccomp");
    } else {
      root = clause_body(true);
    }
    attach(root, -1, "root");
    if (intro >= 0) {
      attach(intro, root, intro_label);
      attach(intro_comma, root, "punct");
    }

    const double tail = uniform01(rng_);
    if (tail < 0.18) {
      const int cc = add("and", "and", "CCONJ");
      const Verb& v = pick(kTransitive);
      const int verb = add(v.past, v.lemma, "VERB");
      attach(cc, verb, "cc");
      attach(noun_phrase(), verb, "obj");
      attach(verb, root, "conj");
    } else if (tail < 0.32) {
      const int comma = add(",", ",", "PUNCT");
      const std::string_view s = pick(kSubordinators);
      const int mark = add(s, s, "SCONJ");
      const int verb = clause_body(false);
      attach(mark, verb, "mark");
      attach(comma, verb, "punct");
      attach(verb, root, "advcl");
    }
    attach(add(".", ".", "PUNCT"), root, "punct");

    // Sentence-initial capital.
    std::string& first = nodes_.front().form;
    first = capitalize(first);
  }

  std::mt19937_64& rng_;
  std::vector<Node> nodes_;
};

double keep_probability(const ParseGraph& g, Position v) {
  const Token& t = g.token(v);
  const std::string& label = g.parent_label(v);
  if (label == "punct") return 0.0;
  if (label == "flat" || label == "case" || label == "mark" || label == "cc") return 1.0;
  if (label == "nsubj" || label == "obj") return 0.95;
  if (label == "ccomp") return 0.85;
  if (label == "advmod") return t.lemma == "not" ? 1.0 : 0.12;
  if (label == "compound") return 0.8;
  if (label == "nummod") return 0.6;
  if (label == "amod") return 0.3;
  if (label == "det") return 0.08;
  if (label == "aux") return 0.25;
  if (label == "nmod") return 0.35;
  if (label == "obl") {
    // Sentence-initial adverbials are dropped more often than trailing ones.
    const Position head = g.parent(v);
    return v < head ? 0.15 : 0.45;
  }
  if (label == "conj") return 0.3;
  if (label == "acl:relcl") return 0.12;
  if (label == "advcl") return 0.2;
  return 0.3;
}

}  // namespace

std::vector<ParseGraph> synthesize_sentences(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ParseGraph> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    SentenceBuilder b(rng);
    out.push_back(b.build("syn" + std::to_string(seed) + "-" + std::to_string(i + 1)));
  }
  return out;
}

VertexSet synthesize_gold(const ParseGraph& g, std::mt19937_64& rng) {
  // Top-down: a dependent can only be kept when its head is. Once the kept
  // material passes ~40% of the sentence, optional modifiers thin out.
  const int limit = static_cast<int>(0.4 * g.char_len());
  std::vector<std::uint8_t> keep(static_cast<std::size_t>(g.size() + 1), 0);
  keep[0] = 1;
  int kept_len = -1;
  std::vector<Position> stack(g.children(kRoot).rbegin(), g.children(kRoot).rend());
  while (!stack.empty()) {
    const Position v = stack.back();
    stack.pop_back();
    const Position head = g.parent(v);
    if (!keep[static_cast<std::size_t>(head)]) continue;
    double p = head == kRoot ? 1.0 : keep_probability(g, v);
    if (p < 0.9 && kept_len > limit) p *= 0.4;
    if (uniform01(rng) >= p) continue;
    keep[static_cast<std::size_t>(v)] = 1;
    kept_len += g.token(v).char_len + 1;
    const auto ch = g.children(v);
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  VertexSet gold;
  for (Position v = 1; v <= g.size(); ++v)
    if (keep[static_cast<std::size_t>(v)]) gold.push_back(v);
  return gold;
}

}  // namespace qfc
