#include "qfc/lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "qfc/corpus.hpp"
#include "qfc/error.hpp"

namespace qfc {

namespace {

constexpr double kLog10Floor = -99.0;

std::string fmt_log10(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", p > 0 ? std::log10(p) : kLog10Floor);
  return buf;
}

double from_log10(double lp) { return lp <= kLog10Floor ? 0.0 : std::pow(10.0, lp); }

}  // namespace

std::vector<std::string> lm_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t sp = text.find(' ', start);
    if (sp == std::string_view::npos) sp = text.size();
    if (sp > start) out.push_back(ascii_lower(text.substr(start, sp - start)));
    start = sp + 1;
  }
  return out;
}

TrigramLM::Id TrigramLM::lookup(std::string_view w) const {
  const auto it = ids_.find(std::string(w));
  return it == ids_.end() ? unk_ : it->second;
}

TrigramLM::Id TrigramLM::intern(const std::string& w) {
  const auto [it, fresh] = ids_.try_emplace(w, static_cast<Id>(words_.size()));
  if (fresh) words_.push_back(w);
  return it->second;
}

TrigramLM TrigramLM::train(const std::vector<std::vector<std::string>>& sentences, int order, double discount) {
  if (order < 1 || order > 3) throw Error("language model order must be 1, 2 or 3");
  if (!(discount > 0.0 && discount < 1.0)) throw Error("discount must lie in (0, 1)");
  bool any = false;
  for (const auto& s : sentences) any = any || !s.empty();
  if (!any) throw Error("cannot train a language model on an empty corpus");

  std::map<std::string, long> unigram_counts;
  for (const auto& s : sentences)
    for (const std::string& w : s) ++unigram_counts[ascii_lower(w)];

  TrigramLM lm;
  lm.order_ = order;
  lm.discount_ = discount;
  lm.bos_ = lm.intern(std::string(kBos));
  lm.eos_ = lm.intern(std::string(kEos));
  lm.unk_ = lm.intern(std::string(kUnk));
  for (const auto& [w, c] : unigram_counts) lm.intern(w);
  if (lm.words_.size() >= (1u << 21)) throw Error("vocabulary too large for trigram key packing");

  const std::size_t nw = lm.words_.size();
  std::vector<long> c1(nw, 0);
  std::unordered_map<std::uint64_t, long> c2, c3;
  std::vector<Id> ids;
  for (const auto& s : sentences) {
    if (s.empty()) continue;
    ids.clear();
    ids.push_back(lm.bos_);
    for (const std::string& w : s) ids.push_back(lm.ids_.at(ascii_lower(w)));
    ids.push_back(lm.eos_);
    for (std::size_t i = 1; i < ids.size(); ++i) {
      ++c1[ids[i]];
      ++c2[key2(ids[i - 1], ids[i])];
      if (i >= 2) ++c3[key3(ids[i - 2], ids[i - 1], ids[i])];
    }
  }

  // Vocabulary: everything predicted (observed words and </s>).
  for (Id id = 0; id < nw; ++id)
    if (c1[id] > 0) lm.vocab_.push_back(lm.words_[id]);
  std::sort(lm.vocab_.begin(), lm.vocab_.end());

  const double D = discount;
  long total = 0, types = 0;
  for (Id id = 0; id < nw; ++id) {
    total += c1[id];
    types += c1[id] > 0;
  }
  const double uniform = D * static_cast<double>(types) / static_cast<double>(total) /
                         static_cast<double>(lm.vocab_.size() + 1);
  lm.p1_.assign(nw, 0.0);
  lm.bow1_.assign(nw, 1.0);
  for (Id id = 0; id < nw; ++id)
    if (c1[id] > 0) lm.p1_[id] = (static_cast<double>(c1[id]) - D) / static_cast<double>(total) + uniform;
  lm.p1_[lm.unk_] = uniform;

  if (order >= 2) {
    std::vector<long> ctx_total(nw, 0), ctx_types(nw, 0);
    for (const auto& [k, c] : c2) {
      const Id h = static_cast<Id>(k >> 32);
      ctx_total[h] += c;
      ++ctx_types[h];
    }
    for (Id h = 0; h < nw; ++h)
      if (ctx_total[h] > 0) lm.bow1_[h] = D * static_cast<double>(ctx_types[h]) / static_cast<double>(ctx_total[h]);
    for (const auto& [k, c] : c2) {
      const Id h = static_cast<Id>(k >> 32);
      const Id w = static_cast<Id>(k & 0xFFFFFFFFu);
      lm.p2_[k] = (static_cast<double>(c) - D) / static_cast<double>(ctx_total[h]) + lm.bow1_[h] * lm.p1_[w];
    }
  }
  if (order >= 3) {
    std::unordered_map<std::uint64_t, std::pair<long, long>> ctx;  // key2(h1,h2) -> (total, types)
    for (const auto& [k, c] : c3) {
      auto& e = ctx[key2(static_cast<Id>(k >> 42), static_cast<Id>((k >> 21) & 0x1FFFFF))];
      e.first += c;
      ++e.second;
    }
    for (const auto& [k, e] : ctx) lm.bow2_[k] = D * static_cast<double>(e.second) / static_cast<double>(e.first);
    for (const auto& [k, c] : c3) {
      const Id h1 = static_cast<Id>(k >> 42), h2 = static_cast<Id>((k >> 21) & 0x1FFFFF),
               w = static_cast<Id>(k & 0x1FFFFF);
      const auto& e = ctx.at(key2(h1, h2));
      const auto it2 = lm.p2_.find(key2(h2, w));
      const double lower = it2 != lm.p2_.end() ? it2->second : lm.bow1_[h2] * lm.p1_[w];
      lm.p3_[k] = (static_cast<double>(c) - D) / static_cast<double>(e.first) + lm.bow2_.at(key2(h1, h2)) * lower;
    }
  }
  return lm;
}

double TrigramLM::unigram_ids(Id w) const { return p1_[w]; }

double TrigramLM::prob_ids(Id w, Id h1, Id h2) const {
  double scale = 1.0;
  if (order_ >= 3 && h1 != kNone && h2 != kNone) {
    const auto it = p3_.find(key3(h1, h2, w));
    if (it != p3_.end()) return it->second;
    const auto b = bow2_.find(key2(h1, h2));
    if (b != bow2_.end()) scale = b->second;
  }
  if (order_ >= 2 && h2 != kNone) {
    const auto it = p2_.find(key2(h2, w));
    if (it != p2_.end()) return scale * it->second;
    scale *= bow1_[h2];
  }
  return scale * p1_[w];
}

double TrigramLM::prob(std::string_view word, std::string_view h1, std::string_view h2) const {
  const auto ctx = [this](std::string_view h) { return h.empty() ? kNone : lookup(ascii_lower(h)); };
  return prob_ids(lookup(ascii_lower(word)), ctx(h1), ctx(h2));
}

double TrigramLM::unigram_prob(std::string_view word) const { return unigram_ids(lookup(ascii_lower(word))); }

double TrigramLM::token_logprob(const std::vector<std::string>& seq) const {
  if (seq.empty()) throw Error("log probability of an empty sequence");
  Id h1 = kNone, h2 = bos_;
  double lp = 0.0;
  for (const std::string& tok : seq) {
    const Id w = lookup(ascii_lower(tok));
    lp += std::log(prob_ids(w, h1, h2));
    h1 = h2;
    h2 = w;
  }
  return lp;
}

double TrigramLM::logprob(const std::vector<std::string>& seq) const {
  const double lp = token_logprob(seq);
  const Id h1 = seq.size() >= 2 ? lookup(ascii_lower(seq[seq.size() - 2])) : bos_;
  const Id h2 = lookup(ascii_lower(seq.back()));
  return lp + std::log(prob_ids(eos_, h1, h2));
}

double TrigramLM::slor(const std::vector<std::string>& seq) const {
  if (seq.empty()) throw Error("SLOR of an empty sequence");
  double lu = 0.0;
  for (const std::string& tok : seq) lu += std::log(unigram_ids(lookup(ascii_lower(tok))));
  return (token_logprob(seq) - lu) / static_cast<double>(seq.size());
}

// ---------------------------------------------------------------------------

std::string TrigramLM::to_arpa() const {
  struct Entry {
    std::string text;
    double p;
    double bow;  // < 0 when absent
  };
  std::vector<Entry> e1, e2, e3;
  for (Id id = 0; id < words_.size(); ++id) {
    const double bow = order_ >= 2 ? bow1_[id] : -1.0;
    if (id == bos_)
      e1.push_back({words_[id], 0.0, bow});
    else if (p1_[id] > 0)
      e1.push_back({words_[id], p1_[id], bow});
  }
  for (const auto& [k, p] : p2_) {
    const Id h = static_cast<Id>(k >> 32), w = static_cast<Id>(k & 0xFFFFFFFFu);
    double bow = -1.0;
    if (order_ >= 3) {
      const auto b = bow2_.find(k);
      bow = b != bow2_.end() ? b->second : 1.0;
    }
    e2.push_back({words_[h] + ' ' + words_[w], p, bow});
  }
  for (const auto& [k, p] : p3_) {
    const Id h1 = static_cast<Id>(k >> 42), h2 = static_cast<Id>((k >> 21) & 0x1FFFFF),
             w = static_cast<Id>(k & 0x1FFFFF);
    e3.push_back({words_[h1] + ' ' + words_[h2] + ' ' + words_[w], p, -1.0});
  }
  const auto by_text = [](const Entry& a, const Entry& b) { return a.text < b.text; };
  std::sort(e1.begin(), e1.end(), by_text);
  std::sort(e2.begin(), e2.end(), by_text);
  std::sort(e3.begin(), e3.end(), by_text);

  std::ostringstream os;
  os << "\\data\\\n";
  os << "ngram 1=" << e1.size() << '\n';
  if (order_ >= 2) os << "ngram 2=" << e2.size() << '\n';
  if (order_ >= 3) os << "ngram 3=" << e3.size() << '\n';
  const auto section = [&os](int n, const std::vector<Entry>& es) {
    os << "\n\\" << n << "-grams:\n";
    for (const Entry& e : es) {
      os << fmt_log10(e.p) << '\t' << e.text;
      if (e.bow >= 0) os << '\t' << fmt_log10(e.bow);
      os << '\n';
    }
  };
  section(1, e1);
  if (order_ >= 2) section(2, e2);
  if (order_ >= 3) section(3, e3);
  os << "\n\\end\\\n";
  return os.str();
}

TrigramLM TrigramLM::from_arpa(std::string_view text) {
  TrigramLM lm;
  lm.order_ = 0;
  lm.bos_ = lm.intern(std::string(kBos));
  lm.eos_ = lm.intern(std::string(kEos));
  lm.unk_ = lm.intern(std::string(kUnk));

  struct Row {
    int n;
    double lp;
    std::vector<std::string> words;
    double bow_lp;
    bool has_bow;
  };
  std::vector<Row> rows;
  int section = 0;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  bool ended = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == "\\data\\") continue;
    if (line == "\\end\\") {
      ended = true;
      break;
    }
    if (line.rfind("ngram ", 0) == 0) {
      lm.order_ = std::max(lm.order_, std::stoi(line.substr(6, line.find('=') - 6)));
      continue;
    }
    if (line.front() == '\\') {
      section = line[1] - '0';
      if (section < 1 || section > 3) throw ParseError("unsupported ARPA section " + line, line_no);
      continue;
    }
    if (section == 0) throw ParseError("ARPA entry before any n-gram section", line_no);
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) tab = line.size();
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() < 2 || fields.size() > 3) throw ParseError("malformed ARPA entry", line_no);
    Row r{section, std::stod(fields[0]), {}, 0.0, fields.size() == 3};
    std::istringstream ws(fields[1]);
    for (std::string w; ws >> w;) r.words.push_back(w);
    if (static_cast<int>(r.words.size()) != section) throw ParseError("n-gram length does not match section", line_no);
    if (r.has_bow) r.bow_lp = std::stod(fields[2]);
    rows.push_back(std::move(r));
  }
  if (!ended) throw ParseError("ARPA text lacks \\end\\", 0);
  if (lm.order_ < 1 || lm.order_ > 3) throw ParseError("ARPA order must be 1-3", 0);

  for (const Row& r : rows)
    for (const std::string& w : r.words) lm.intern(w);
  lm.p1_.assign(lm.words_.size(), 0.0);
  lm.bow1_.assign(lm.words_.size(), 1.0);
  for (const Row& r : rows) {
    const auto id = [&lm](const std::string& w) { return lm.ids_.at(w); };
    if (r.n == 1) {
      lm.p1_[id(r.words[0])] = from_log10(r.lp);
      if (r.has_bow) lm.bow1_[id(r.words[0])] = from_log10(r.bow_lp);
    } else if (r.n == 2) {
      const auto k = key2(id(r.words[0]), id(r.words[1]));
      lm.p2_[k] = from_log10(r.lp);
      if (r.has_bow) lm.bow2_[k] = from_log10(r.bow_lp);
    } else {
      lm.p3_[key3(id(r.words[0]), id(r.words[1]), id(r.words[2]))] = from_log10(r.lp);
    }
  }
  for (Id id = 0; id < lm.words_.size(); ++id)
    if (id != lm.bos_ && id != lm.unk_ && lm.p1_[id] > 0) lm.vocab_.push_back(lm.words_[id]);
  std::sort(lm.vocab_.begin(), lm.vocab_.end());
  return lm;
}

}  // namespace qfc
