#include "qfc/instance_io.hpp"

#include <fstream>
#include <sstream>

#include "qfc/error.hpp"

namespace qfc {

using nlohmann::json;

namespace {

VertexSet positions_from_json(const json& j) {
  VertexSet out = j.get<VertexSet>();
  normalize(out);
  return out;
}

}  // namespace

json graph_to_json(const ParseGraph& g) {
  json tokens = json::array();
  for (const Token& t : g.tokens()) tokens.push_back({{"form", t.form}, {"lemma", t.lemma}, {"upos", t.upos}});
  json edges = json::array();
  for (const DepEdge& e : g.tree_edges()) edges.push_back(json::array({e.head, e.child, e.label}));
  return {{"id", g.id()}, {"tokens", std::move(tokens)}, {"edges", std::move(edges)}};
}

ParseGraph graph_from_json(const json& j) {
  std::vector<Token> tokens;
  int pos = 0;
  for (const json& t : j.at("tokens")) {
    Token tok;
    tok.position = ++pos;
    tok.form = t.at("form").get<std::string>();
    tok.lemma = t.contains("lemma") ? t["lemma"].get<std::string>() : ascii_lower(tok.form);
    tok.upos = t.contains("upos") ? t["upos"].get<std::string>() : "X";
    tokens.push_back(std::move(tok));
  }
  std::vector<DepEdge> edges;
  for (const json& e : j.at("edges"))
    edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<std::string>(), EdgeOrigin::tree});
  return ParseGraph::build(j.at("id").get<std::string>(), std::move(tokens), std::move(edges));
}

json instance_to_json(const Instance& inst) {
  json j = graph_to_json(*inst.graph);
  j["id"] = inst.id;
  j["query"] = inst.query;
  j["budget"] = inst.budget;
  if (inst.gold) j["gold"] = *inst.gold;
  if (!inst.split.empty()) j["split"] = inst.split;
  return j;
}

Instance instance_from_json(const json& j) {
  Instance inst;
  inst.graph = std::make_shared<const ParseGraph>(graph_from_json(j));
  inst.id = inst.graph->id();
  inst.query = j.contains("query") ? positions_from_json(j["query"]) : VertexSet{};
  if (!j.contains("budget")) throw ContractError("instance " + inst.id + " lacks a budget");
  inst.budget = j["budget"].get<int>();
  if (j.contains("gold") && !j["gold"].is_null()) inst.gold = positions_from_json(j["gold"]);
  if (j.contains("split")) inst.split = j["split"].get<std::string>();
  inst.validate();
  return inst;
}

json decision_to_json(const std::string& instance_id, const Decision& d) {
  return {{"instance_id", instance_id}, {"candidate", d.candidate}, {"label", d.label},
          {"timestep", d.snapshot.timestep()}};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<json> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ": " + e.what(), line_no);
    }
  }
  return rows;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const json& r : rows) out << r.dump() << '\n';
}

std::vector<Instance> read_instances(const std::filesystem::path& path) {
  std::vector<Instance> out;
  int line_no = 0;
  for (const json& j : read_jsonl(path)) {
    ++line_no;
    try {
      out.push_back(instance_from_json(j));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ": record " + std::to_string(line_no) + ": " + e.what(), 0);
    }
  }
  return out;
}

void write_instances(const std::filesystem::path& path, const std::vector<Instance>& instances) {
  std::vector<json> rows;
  rows.reserve(instances.size());
  for (const Instance& i : instances) rows.push_back(instance_to_json(i));
  write_jsonl(path, rows);
}

std::vector<ParseGraph> read_graphs(const std::filesystem::path& path) {
  if (path.extension() == ".conllu") return parse_conllu(read_text_file(path));
  std::vector<ParseGraph> out;
  for (const json& j : read_jsonl(path)) out.push_back(graph_from_json(j));
  return out;
}

}  // namespace qfc
