#include "qfc/service.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <unordered_set>

#include <httplib.h>

#include "qfc/error.hpp"

namespace qfc {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

const std::vector<std::size_t> kNoPostings;

}  // namespace

InvertedIndex InvertedIndex::build(std::vector<std::shared_ptr<const ParseGraph>> graphs) {
  InvertedIndex idx;
  std::unordered_set<std::string> ids;
  for (std::size_t doc = 0; doc < graphs.size(); ++doc) {
    const ParseGraph& g = *graphs[doc];
    if (!ids.insert(g.id()).second) throw ContractError("duplicate sentence id " + g.id());
    for (const Token& t : g.tokens()) {
      auto& list = idx.postings_[ascii_lower(t.form)];
      if (list.empty() || list.back() != doc) list.push_back(doc);
    }
  }
  idx.graphs_ = std::move(graphs);
  return idx;
}

const std::vector<std::size_t>& InvertedIndex::postings(const std::string& term) const {
  const auto it = postings_.find(ascii_lower(term));
  return it == postings_.end() ? kNoPostings : it->second;
}

std::vector<std::string> split_terms(std::string_view q) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < q.size()) {
    while (i < q.size() && std::isspace(static_cast<unsigned char>(q[i]))) ++i;
    std::size_t j = i;
    while (j < q.size() && !std::isspace(static_cast<unsigned char>(q[j]))) ++j;
    if (j > i) out.emplace_back(q.substr(i, j - i));
    i = j;
  }
  return out;
}

SearchResult search(const InvertedIndex& index, const std::vector<std::string>& terms, int budget, int k,
                    const std::string& engine, const EngineMap& engines) {
  const auto t0 = Clock::now();
  if (k < 1) throw ContractError("k must be at least 1");
  if (budget < 1) throw ContractError("budget must be at least 1");
  const auto eng = engines.find(engine);
  if (eng == engines.end()) throw ContractError("unknown engine '" + engine + "'");

  SearchResult r;
  r.budget = budget;
  for (const std::string& t : terms) {
    std::string lower = ascii_lower(t);
    if (std::find(r.terms.begin(), r.terms.end(), lower) == r.terms.end()) r.terms.push_back(std::move(lower));
  }
  if (r.terms.empty()) {
    r.total_ms = ms_since(t0);
    return r;
  }

  // Intersect postings, rarest term first.
  std::vector<const std::vector<std::size_t>*> lists;
  for (const std::string& t : r.terms) lists.push_back(&index.postings(t));
  std::sort(lists.begin(), lists.end(), [](auto* a, auto* b) { return a->size() < b->size(); });
  std::vector<std::size_t> docs = *lists.front();
  for (std::size_t i = 1; i < lists.size() && !docs.empty(); ++i) {
    std::vector<std::size_t> next;
    std::set_intersection(docs.begin(), docs.end(), lists[i]->begin(), lists[i]->end(), std::back_inserter(next));
    docs = std::move(next);
  }
  std::sort(docs.begin(), docs.end(), [&](std::size_t a, std::size_t b) {
    const ParseGraph& ga = index.graph(a);
    const ParseGraph& gb = index.graph(b);
    if (ga.char_len() != gb.char_len()) return ga.char_len() < gb.char_len();
    return ga.id() < gb.id();
  });

  for (std::size_t doc : docs) {
    if (static_cast<int>(r.snippets.size()) >= k) break;
    Instance inst;
    inst.graph = index.graph_ptr(doc);
    inst.id = inst.graph->id();
    inst.budget = budget;
    for (const std::string& t : r.terms) {
      for (const Token& tok : inst.graph->tokens()) {
        if (ascii_lower(tok.form) == t) {
          inst.query.push_back(tok.position);
          break;
        }
      }
    }
    normalize(inst.query);
    const int qlen = linear_length(*inst.graph, inst.query);
    if (qlen > budget) {
      r.skipped.push_back({inst.id, "query terms need " + std::to_string(qlen) + " characters, budget is " +
                                        std::to_string(budget)});
      continue;
    }
    const auto ts = Clock::now();
    const VertexSet c = eng->second(inst);
    const double latency = ms_since(ts);
    Linearization lin = linearize(*inst.graph, c);
    r.snippets.push_back({inst.id, std::move(lin.text), lin.char_len, engine, latency});
  }
  r.total_ms = ms_since(t0);
  return r;
}

std::string check_snippet(const Snippet& s, const std::vector<std::string>& terms, int budget) {
  if (utf8_length(s.text) != s.char_len) return "char_len does not match text";
  if (s.char_len > budget) return "snippet exceeds budget";
  std::unordered_set<std::string> words;
  for (const std::string& w : split_terms(s.text)) words.insert(ascii_lower(w));
  for (const std::string& t : terms)
    if (!words.count(ascii_lower(t))) return "query term '" + t + "' missing";
  return "";
}

json search_result_to_json(const SearchResult& r) {
  json snippets = json::array();
  for (const Snippet& s : r.snippets)
    snippets.push_back({{"sentence_id", s.sentence_id},
                        {"text", s.text},
                        {"char_len", s.char_len},
                        {"engine", s.engine},
                        {"latency_ms", s.latency_ms}});
  json skipped = json::array();
  for (const Skipped& s : r.skipped) skipped.push_back({{"sentence_id", s.sentence_id}, {"reason", s.reason}});
  std::string query;
  for (const std::string& t : r.terms) query += (query.empty() ? "" : " ") + t;
  return {{"query", query}, {"budget", r.budget}, {"snippets", snippets}, {"skipped", skipped},
          {"total_ms", r.total_ms}};
}

struct SnippetServer::Impl {
  Impl(const InvertedIndex& i, const EngineMap& e) : index(i), engines(e) {}
  const InvertedIndex& index;
  const EngineMap& engines;
  httplib::Server server;
};

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_header("Access-Control-Allow-Origin", "*");
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

int int_param(const httplib::Request& req, const char* name, int fallback) {
  if (!req.has_param(name)) return fallback;
  const std::string v = req.get_param_value(name);
  std::size_t used = 0;
  int out = 0;
  try {
    out = std::stoi(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ContractError(std::string("parameter ") + name + " must be an integer");
  return out;
}

}  // namespace

SnippetServer::SnippetServer(const InvertedIndex& index, const EngineMap& engines)
    : impl_(std::make_unique<Impl>(index, engines)) {
  Impl& s = *impl_;
  s.server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { reply(res, 200, {{"ok", true}}); });
  s.server.Get("/engines", [&s](const httplib::Request&, httplib::Response& res) {
    json names = json::array();
    for (const auto& [name, unused] : s.engines) names.push_back(name);
    reply(res, 200, {{"engines", names}});
  });
  s.server.Get("/search", [&s](const httplib::Request& req, httplib::Response& res) {
    try {
      const std::string q = req.has_param("q") ? req.get_param_value("q") : "";
      const int b = int_param(req, "b", 75);
      const int k = int_param(req, "k", 3);
      std::string engine = req.has_param("engine") ? req.get_param_value("engine") : "vertex_lr";
      const SearchResult r = search(s.index, split_terms(q), b, k, engine, s.engines);
      reply(res, 200, search_result_to_json(r));
    } catch (const ContractError& e) {
      reply(res, 400, {{"error", e.what()}});
    } catch (const std::exception& e) {
      reply(res, 500, {{"error", e.what()}});
    }
  });
}

SnippetServer::~SnippetServer() { stop(); }

int SnippetServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) throw Error("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void SnippetServer::listen() { impl_->server.listen_after_bind(); }

void SnippetServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace qfc
