#pragma once

// JSON-lines interchange for graphs and instances:
//   {"id", "tokens":[{"form","lemma","upos"}...], "edges":[[head,child,"label"]...],
//    "query":[positions], "budget":int, "gold":[positions], "split":"train"|"test"}
// Graph-only records omit query/budget/gold.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfc/corpus.hpp"
#include "qfc/engine.hpp"

namespace qfc {

nlohmann::json graph_to_json(const ParseGraph& g);
ParseGraph graph_from_json(const nlohmann::json& j);

nlohmann::json instance_to_json(const Instance& inst);
/// Requires "budget". Validates the instance.
Instance instance_from_json(const nlohmann::json& j);

/// {"instance_id", "candidate", "label", "timestep"}: one oracle decision.
nlohmann::json decision_to_json(const std::string& instance_id, const Decision& d);

/// Reads a file as JSON lines; blank lines are skipped. Errors carry the line number.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows);

std::vector<Instance> read_instances(const std::filesystem::path& path);
void write_instances(const std::filesystem::path& path, const std::vector<Instance>& instances);

/// Loads graphs from CoNLL-U (".conllu") or JSON lines (anything else).
std::vector<ParseGraph> read_graphs(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace qfc
