#include "qfc/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "qfc/datagen.hpp"
#include "qfc/error.hpp"
#include "qfc/instance_io.hpp"
#include "qfc/model_io.hpp"
#include "qfc/service.hpp"
#include "qfc/systems.hpp"

namespace qfc::cli {

using nlohmann::json;

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<const ParseGraph*> graph_ptrs(const std::vector<Instance>& instances) {
  std::vector<const ParseGraph*> out;
  for (const Instance& inst : instances) out.push_back(inst.graph.get());
  return out;
}

/// Shares one root-transformed graph per instance so every engine sees
/// the same input and ILP timing excludes the transform.
void pretransform(std::vector<Instance>& instances) {
  for (Instance& inst : instances)
    if (!inst.graph->transformed())
      inst.graph = std::make_shared<const ParseGraph>(transform_root_edges(*inst.graph));
}

struct NamedSystem {
  std::string name;
  std::string path;
};

std::vector<NamedSystem> parse_systems(const std::vector<std::string>& specs) {
  std::vector<NamedSystem> out;
  for (const std::string& s : specs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
      throw CLI::ValidationError("--system", "expected name=model_path, got '" + s + "'");
    out.push_back({s.substr(0, eq), s.substr(eq + 1)});
  }
  return out;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string input, out, tag;
  int synthesize = 0;
  std::uint64_t seed = 1;
  bool relabel = false;
};

int cmd_ingest(const IngestArgs& a) {
  std::vector<json> rows;
  if (a.synthesize > 0) {
    for (const ParseGraph& g : synthesize_sentences(a.synthesize, a.seed)) rows.push_back(graph_to_json(g));
  } else if (a.input.ends_with(".conllu")) {
    for (const ParseGraph& g : read_graphs(a.input)) rows.push_back(graph_to_json(g));
  } else {
    rows = read_jsonl(a.input);
  }
  std::vector<json> out;
  for (json& row : rows) {
    ParseGraph g = graph_from_json(row);
    if (a.relabel) g = relabel_function_edges(g);
    json j = graph_to_json(g);
    if (row.contains("gold")) j["gold"] = row["gold"];
    if (!a.tag.empty())
      j["split"] = a.tag;
    else if (row.contains("split"))
      j["split"] = row["split"];
    out.push_back(std::move(j));
  }
  write_jsonl(a.out, out);
  std::cerr << "ingested " << out.size() << " sentences\n";
  return 0;
}

struct DatasetArgs {
  std::string graphs, train, valid, test, config, decisions;
  std::uint64_t seed = 1;
  std::size_t validation_size = SplitOptions{}.validation_size;
  double fallback_fraction = SplitOptions{}.fallback_fraction;
};

int cmd_make_dataset(const DatasetArgs& a) {
  QueryLengthDist dist;
  if (!a.config.empty()) dist = QueryLengthDist::from_json(json::parse(read_text_file(a.config)));
  dist.validate();

  const std::vector<json> rows = read_jsonl(a.graphs);
  std::vector<Instance> instances;
  std::vector<std::string> tags;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto g = std::make_shared<const ParseGraph>(graph_from_json(rows[i]));
    std::mt19937_64 rng(mix_seed(a.seed, i));
    VertexSet gold = rows[i].contains("gold") ? rows[i]["gold"].get<VertexSet>() : synthesize_gold(*g, rng);
    std::optional<Instance> inst = build_instance(g, std::move(gold), dist, rng);
    if (!inst) {
      ++skipped;
      continue;
    }
    tags.push_back(rows[i].value("split", ""));
    instances.push_back(std::move(*inst));
  }

  const CorpusSplit split = split_corpus(tags, a.seed, {a.validation_size, a.fallback_fraction});
  const auto emit = [&](const std::vector<std::size_t>& idx, const std::string& name, const std::string& path) {
    std::vector<Instance> part;
    for (std::size_t i : idx) {
      part.push_back(instances[i]);
      part.back().split = name;
    }
    if (!path.empty()) write_instances(path, part);
    return part.size();
  };
  const std::size_t ntrain = emit(split.train, "train", a.train);
  if (!a.decisions.empty()) {
    std::vector<json> rows_out;
    for (std::size_t i : split.train)
      for (const Decision& d : oracle_path(instances[i])) rows_out.push_back(decision_to_json(instances[i].id, d));
    write_jsonl(a.decisions, rows_out);
  }
  const std::size_t nvalid = emit(split.validation, "validation", a.valid);
  const std::size_t ntest = emit(split.test, "test", a.test);
  if (ntest > 0 && a.test.empty()) std::cerr << "warning: " << ntest << " test instances not written (no --test)\n";
  std::cerr << "instances: train " << ntrain << ", validation " << nvalid << ", test " << ntest << ", skipped "
            << skipped << (split.used_fallback ? " (validation fraction fallback)" : "") << "\n";
  return 0;
}

struct TrainLRArgs {
  std::string train, valid, out, kind = "lr", dump;
  double c = 10.0;
  bool grid = false;
  std::uint64_t seed = 1;
  std::uint32_t dim = FeatureConfig{}.dim;
  int vocab_cutoff = FeatureConfig{}.lexical_vocab_cutoff;
  int max_passes = LROptions{}.max_passes;
};

int cmd_train_lr(const TrainLRArgs& a) {
  const std::vector<Instance> train = read_instances(a.train);
  FeatureConfig config = a.kind == "ablated" ? FeatureConfig::ablated() : FeatureConfig::full();
  config.dim = a.dim;
  config.lexical_vocab_cutoff = a.vocab_cutoff;
  config.validate();

  if (a.kind == "random") {
    std::vector<int> labels;
    for (const Instance& inst : train)
      for_each_oracle_decision(inst, [&](const CompressionState&, Position, int y) { labels.push_back(y); });
    const RandomPolicy p = fit_random_policy(labels, a.seed);
    save_model(a.out, RandomModel{p.accept_prob(), a.seed});
    std::cerr << "random policy: accept_prob " << p.accept_prob() << " from " << labels.size() << " decisions\n";
    return 0;
  }

  const Lexicon lexicon = Lexicon::build(graph_ptrs(train), config.lexical_vocab_cutoff);
  const TrainingSet data = build_training_set(train, config, lexicon);
  LROptions opt;
  opt.c = a.c;
  opt.max_passes = a.max_passes;
  if (a.grid) {
    const std::vector<Instance> valid = read_instances(a.valid);
    const GridResult g = grid_search_c(data, config, lexicon, valid);
    for (std::size_t i = 0; i < g.grid.size(); ++i)
      std::cerr << "c = " << g.grid[i] << ": validation F1 " << g.f1[i] << "\n";
    opt.c = g.best_c;
  }
  LRTrainStats stats;
  const LRModel model = train_lr(data, config, lexicon, opt, &stats);
  save_model(a.out, model);
  std::cerr << a.kind << ": " << data.size() << " decisions, c " << opt.c << ", " << stats.iterations
            << " iterations, loss " << stats.final_loss << (stats.converged ? "" : " (not converged)") << "\n";
  if (!a.dump.empty()) write_text_file(a.dump, feature_dump(model, train));
  return 0;
}

struct TrainILPArgs {
  std::string train, out, dump;
  int epochs = PerceptronOptions{}.epochs;
  long node_limit = kDefaultNodeLimit;
  std::uint32_t dim = FeatureConfig{}.dim;
  int vocab_cutoff = FeatureConfig{}.lexical_vocab_cutoff;
};

int cmd_train_ilp(const TrainILPArgs& a) {
  const std::vector<Instance> train = read_instances(a.train);
  const Lexicon lexicon = Lexicon::build(graph_ptrs(train), a.vocab_cutoff);
  std::vector<PerceptronPair> pairs;
  for (const Instance& inst : train) {
    if (!inst.gold) throw ContractError("instance " + inst.id + " has no gold compression");
    pairs.push_back({inst.graph, *inst.gold});
  }
  PerceptronOptions opt;
  opt.epochs = a.epochs;
  opt.node_limit = a.node_limit;
  opt.dim = a.dim;
  PerceptronStats stats;
  ILPModel model = train_perceptron(pairs, lexicon, opt, &stats);
  model.config.lexical_vocab_cutoff = a.vocab_cutoff;
  save_model(a.out, model);
  std::cerr << "perceptron: " << stats.steps << " steps, " << stats.updates << " updates, " << stats.skipped
            << " skipped at the node limit\n";
  if (!a.dump.empty()) write_text_file(a.dump, feature_dump(model, train));
  return 0;
}

struct TrainLMArgs {
  std::string input, out;
  int order = 3;
  double discount = 0.75;
};

int cmd_train_lm(const TrainLMArgs& a) {
  std::vector<std::vector<std::string>> sentences;
  for (const ParseGraph& g : read_graphs(a.input)) {
    std::vector<std::string> words;
    for (const Token& t : g.tokens()) words.push_back(ascii_lower(t.form));
    sentences.push_back(std::move(words));
  }
  const TrigramLM lm = TrigramLM::train(sentences, a.order, a.discount);
  write_text_file(a.out, lm.to_arpa());
  std::cerr << "language model: " << sentences.size() << " sentences, " << lm.vocab_size() << " types\n";
  return 0;
}

struct CompressArgs {
  std::string model, input, out;
  int jobs = 1;
  long node_limit = kDefaultNodeLimit;
};

int cmd_compress(const CompressArgs& a) {
  const auto model = std::make_shared<const AnyModel>(load_model(a.model));
  const System system = make_system(model, a.node_limit);
  const std::vector<Instance> instances = read_instances(a.input);

  std::vector<json> rows(instances.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < instances.size() && !failed; i = next++) {
      try {
        const auto t0 = std::chrono::steady_clock::now();
        const VertexSet c = system(instances[i]);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        const Linearization lin = linearize(*instances[i].graph, c);
        rows[i] = {{"id", instances[i].id},
                   {"compression", c},
                   {"text", lin.text},
                   {"char_len", lin.char_len},
                   {"budget", instances[i].budget},
                   {"timing", {{"latency_ms", ms}}}};
      } catch (const std::exception& e) {
        const std::lock_guard lock(error_mutex);
        if (!failed.exchange(true)) first_error = instances[i].id + ": " + e.what();
      }
    }
  };
  const int jobs = std::max(1, a.jobs);
  std::vector<std::thread> threads;
  for (int t = 1; t < jobs; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (failed) throw Error(first_error);
  write_jsonl(a.out, rows);
  std::cerr << "compressed " << rows.size() << " instances with " << model_kind(*model) << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string instances, lm, out, tsv;
  std::vector<std::string> systems;
  int resamples = 10000;
  std::uint64_t seed = 1;
  long node_limit = kDefaultNodeLimit;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const std::vector<NamedSystem> systems = parse_systems(a.systems);
  std::vector<Instance> instances = read_instances(a.instances);
  pretransform(instances);
  std::optional<TrigramLM> lm;
  if (!a.lm.empty()) lm = TrigramLM::from_arpa(read_text_file(a.lm));

  EvalReport report;
  for (const NamedSystem& ns : systems) {
    const auto model = std::make_shared<const AnyModel>(load_model(ns.path));
    report.systems.push_back(
        evaluate_suite(ns.name, make_system(model, a.node_limit), instances, lm ? &*lm : nullptr));
    const SystemReport& s = report.systems.back();
    std::cerr << s.name << ": F1 " << s.mean_f1 << ", ratio " << s.mean_ratio;
    if (s.mean_slor) std::cerr << ", SLOR " << *s.mean_slor;
    std::cerr << ", " << s.mean_latency_ms << " ms";
    if (s.failures) std::cerr << ", " << s.failures << " failures";
    std::cerr << "\n";
  }
  if (report.systems.size() >= 2) add_significance(report, a.resamples, a.seed);
  for (const SignificanceEntry& e : report.significance)
    if (e.mean_a >= e.mean_b)
      std::cerr << e.metric << " " << e.system_a << " > " << e.system_b << ": p = " << e.p_one_sided << "\n";
  write_text_file(a.out, report_to_json(report).dump(2) + "\n");
  if (!a.tsv.empty()) write_text_file(a.tsv, report_to_tsv(report));
  return 0;
}

struct BenchArgs {
  std::string instances, out;
  std::vector<std::string> systems;
  std::size_t samples = 1000, warmup = 100;
  std::uint64_t seed = 1;
  long node_limit = kDefaultNodeLimit;
};

int cmd_bench(const BenchArgs& a) {
  const std::vector<NamedSystem> systems = parse_systems(a.systems);
  std::vector<Instance> instances = read_instances(a.instances);
  pretransform(instances);
  json results = json::array();
  for (const NamedSystem& ns : systems) {
    const auto model = std::make_shared<const AnyModel>(load_model(ns.path));
    const LatencyResult r = latency_bench(make_system(model, a.node_limit), instances, a.samples, a.seed, a.warmup);
    results.push_back({{"name", ns.name},
                       {"samples", r.samples},
                       {"timing", {{"mean_ms", r.mean_ms}, {"stddev_ms", r.stddev_ms}}}});
    std::cerr << ns.name << ": " << r.mean_ms << " ms ± " << r.stddev_ms << " over " << r.samples << " samples\n";
  }
  const json out = {{"seed", a.seed}, {"systems", results}};
  if (a.out.empty())
    std::cout << out.dump(2) << "\n";
  else
    write_text_file(a.out, out.dump(2) + "\n");
  return 0;
}

struct ServeArgs {
  std::string corpus, model, ilp_model, ablated_model, random_model, host = "127.0.0.1";
  int port = 8080;
  long node_limit = kDefaultNodeLimit;
};

SnippetServer* g_server = nullptr;

void add_engine(EngineMap& engines, const std::string& name, const std::string& path, const std::string& kind,
                long node_limit) {
  if (path.empty()) return;
  const auto model = std::make_shared<const AnyModel>(load_model(path));
  if (model_kind(*model) != kind)
    throw ContractError(path + " holds a " + model_kind(*model) + " model, expected " + kind);
  engines[name] = make_system(model, node_limit);
}

int cmd_serve(const ServeArgs& a) {
  std::vector<std::shared_ptr<const ParseGraph>> graphs;
  for (const ParseGraph& g : read_graphs(a.corpus)) graphs.push_back(std::make_shared<const ParseGraph>(transform_root_edges(g)));
  const InvertedIndex index = InvertedIndex::build(std::move(graphs));

  EngineMap engines;
  add_engine(engines, "vertex_lr", a.model, "lr", a.node_limit);
  add_engine(engines, "ilp", a.ilp_model, "ilp", a.node_limit);
  add_engine(engines, "ablated", a.ablated_model, "ablated", a.node_limit);
  add_engine(engines, "random", a.random_model, "random", a.node_limit);
  if (engines.empty()) throw ContractError("no engines loaded; pass at least one model");

  SnippetServer server(index, engines);
  const int port = server.bind(a.host, a.port);
  g_server = &server;
  std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
  std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
  std::cerr << "serving " << index.size() << " sentences on http://" << a.host << ":" << port << "\n";
  server.listen();
  g_server = nullptr;
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Query-focused sentence compression toolkit"};
  app.name("qfc");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  app.footer("Exit codes: 0 success, 1 runtime failure, 2 usage error.");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Validate parsed sentences and write graph JSON lines");
  auto* in_opt = c_ingest->add_option("--input", ingest.input, "CoNLL-U (.conllu) or graph JSON lines")->check(CLI::ExistingFile);
  auto* syn_opt = c_ingest->add_option("--synthesize", ingest.synthesize, "Generate N grammar sentences instead")
                      ->check(CLI::PositiveNumber);
  in_opt->excludes(syn_opt);
  c_ingest->add_option("--seed", ingest.seed, "Generator seed");
  c_ingest->add_flag("--relabel", ingest.relabel, "Suffix nmod/obl/acl/advcl/conj labels with their function word");
  c_ingest->add_option("--tag", ingest.tag, "Split tag to attach to every sentence (e.g. test)");
  c_ingest->add_option("--out", ingest.out, "Output JSON lines")->required();

  DatasetArgs ds;
  auto* c_ds = app.add_subcommand("make-dataset", "Build (S, Q, b, gold) instances and train/validation/test splits");
  c_ds->add_option("--graphs", ds.graphs, "Graph JSON lines (optional gold and split fields)")->required()->check(CLI::ExistingFile);
  c_ds->add_option("--train", ds.train, "Train instances output")->required();
  c_ds->add_option("--valid", ds.valid, "Validation instances output")->required();
  c_ds->add_option("--test", ds.test, "Test instances output");
  c_ds->add_option("--decisions", ds.decisions, "Oracle decisions of the train split, JSON lines");
  c_ds->add_option("--config", ds.config, "Query length distribution JSON")->check(CLI::ExistingFile);
  c_ds->add_option("--seed", ds.seed, "Seed for golds, queries and the split");
  c_ds->add_option("--validation-size", ds.validation_size, "Validation reserve when the pool is large enough");
  c_ds->add_option("--fallback-fraction", ds.fallback_fraction, "Validation fraction for small pools")
      ->check(CLI::Range(0.0, 1.0));

  TrainLRArgs lr;
  auto* c_lr = app.add_subcommand("train-lr", "Train a vertex-addition decision model");
  c_lr->add_option("--train", lr.train, "Train instances")->required()->check(CLI::ExistingFile);
  c_lr->add_option("--out", lr.out, "Model output")->required();
  c_lr->add_option("--kind", lr.kind, "lr, ablated or random")->check(CLI::IsMember({"lr", "ablated", "random"}));
  c_lr->add_option("--c", lr.c, "Inverse regularization strength")->check(CLI::PositiveNumber);
  auto* grid_opt = c_lr->add_flag("--grid", lr.grid, "Choose c from {0.1, 1, 10, 100} on --valid");
  c_lr->add_option("--valid", lr.valid, "Validation instances for --grid")->check(CLI::ExistingFile)->needs(grid_opt);
  c_lr->add_option("--seed", lr.seed, "Seed stored in random policies");
  c_lr->add_option("--dim", lr.dim, "Hashed feature dimension (power of two, at least 65536)");
  c_lr->add_option("--vocab-cutoff", lr.vocab_cutoff, "Lexical feature vocabulary size");
  c_lr->add_option("--max-passes", lr.max_passes, "Optimizer iteration cap")->check(CLI::PositiveNumber);
  c_lr->add_option("--dump-features", lr.dump, "Write name/index/weight TSV");

  TrainILPArgs ilp;
  auto* c_ilp = app.add_subcommand("train-ilp", "Train the edge-selection baseline with an averaged perceptron");
  c_ilp->add_option("--train", ilp.train, "Train instances")->required()->check(CLI::ExistingFile);
  c_ilp->add_option("--out", ilp.out, "Model output")->required();
  c_ilp->add_option("--epochs", ilp.epochs, "Passes over the data")->check(CLI::PositiveNumber);
  c_ilp->add_option("--node-limit", ilp.node_limit, "Branch-and-bound node cap per decode (-1: none)");
  c_ilp->add_option("--dim", ilp.dim, "Hashed feature dimension");
  c_ilp->add_option("--vocab-cutoff", ilp.vocab_cutoff, "Lexical feature vocabulary size");
  c_ilp->add_option("--dump-features", ilp.dump, "Write name/index/weight TSV");

  TrainLMArgs lm;
  auto* c_lm = app.add_subcommand("train-lm", "Train an n-gram language model and write ARPA text");
  c_lm->add_option("--input", lm.input, "Sentences (.conllu or JSON lines)")->required()->check(CLI::ExistingFile);
  c_lm->add_option("--out", lm.out, "ARPA output")->required();
  c_lm->add_option("--order", lm.order, "1, 2 or 3")->check(CLI::Range(1, 3));
  c_lm->add_option("--discount", lm.discount, "Absolute discount")->check(CLI::Range(0.0, 1.0));

  CompressArgs cmp;
  auto* c_cmp = app.add_subcommand("compress", "Compress instances with a trained model");
  c_cmp->add_option("--model", cmp.model, "Model file")->required()->check(CLI::ExistingFile);
  c_cmp->add_option("--input", cmp.input, "Instances")->required()->check(CLI::ExistingFile);
  c_cmp->add_option("--out", cmp.out, "Output JSON lines")->required();
  c_cmp->add_option("--jobs", cmp.jobs, "Worker threads")->check(CLI::PositiveNumber);
  c_cmp->add_option("--node-limit", cmp.node_limit, "ILP node cap per decode (-1: none)");

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Score systems on gold instances with significance tests");
  c_ev->add_option("--instances", ev.instances, "Gold instances")->required()->check(CLI::ExistingFile);
  c_ev->add_option("--system", ev.systems, "name=model_path, repeatable")->required();
  c_ev->add_option("--lm", ev.lm, "ARPA model for SLOR")->check(CLI::ExistingFile);
  c_ev->add_option("--out", ev.out, "JSON report")->required();
  c_ev->add_option("--tsv", ev.tsv, "Per-instance TSV");
  c_ev->add_option("--resamples", ev.resamples, "Bootstrap resamples")->check(CLI::PositiveNumber);
  c_ev->add_option("--seed", ev.seed, "Bootstrap seed");
  c_ev->add_option("--node-limit", ev.node_limit, "ILP node cap per decode (-1: none)");

  BenchArgs bn;
  auto* c_bn = app.add_subcommand("bench", "Measure per-compression latency");
  c_bn->add_option("--instances", bn.instances, "Instances")->required()->check(CLI::ExistingFile);
  c_bn->add_option("--system", bn.systems, "name=model_path, repeatable")->required();
  c_bn->add_option("--samples", bn.samples, "Timed compressions per system")->check(CLI::PositiveNumber);
  c_bn->add_option("--warmup", bn.warmup, "Untimed compressions first");
  c_bn->add_option("--seed", bn.seed, "Sampling seed");
  c_bn->add_option("--out", bn.out, "JSON output (default stdout)");
  c_bn->add_option("--node-limit", bn.node_limit, "ILP node cap per decode (-1: none)");

  ServeArgs sv;
  auto* c_sv = app.add_subcommand("serve", "Serve search snippets over HTTP");
  c_sv->add_option("--corpus", sv.corpus, "Sentences (.conllu or JSON lines)")->required()->check(CLI::ExistingFile);
  c_sv->add_option("--model", sv.model, "vertex_lr model")->check(CLI::ExistingFile);
  c_sv->add_option("--ilp-model", sv.ilp_model, "ilp model")->check(CLI::ExistingFile);
  c_sv->add_option("--ablated-model", sv.ablated_model, "ablated model")->check(CLI::ExistingFile);
  c_sv->add_option("--random-model", sv.random_model, "random policy")->check(CLI::ExistingFile);
  c_sv->add_option("--host", sv.host, "Bind address");
  c_sv->add_option("--port", sv.port, "Port (0: any free port)")->check(CLI::Range(0, 65535));
  c_sv->add_option("--node-limit", sv.node_limit, "ILP node cap per decode (-1: none)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    if (argc <= 1 || app.get_subcommands().empty()) std::cerr << app.help();
    return 2;
  }

  try {
    if (c_ingest->parsed()) {
      if (ingest.input.empty() && ingest.synthesize == 0) {
        std::cerr << "ingest: pass --input or --synthesize\n";
        return 2;
      }
      return cmd_ingest(ingest);
    }
    if (c_ds->parsed()) return cmd_make_dataset(ds);
    if (c_lr->parsed()) {
      if (lr.grid && lr.valid.empty()) {
        std::cerr << "train-lr: --grid needs --valid\n";
        return 2;
      }
      return cmd_train_lr(lr);
    }
    if (c_ilp->parsed()) return cmd_train_ilp(ilp);
    if (c_lm->parsed()) return cmd_train_lm(lm);
    if (c_cmp->parsed()) return cmd_compress(cmp);
    if (c_ev->parsed()) return cmd_evaluate(ev);
    if (c_bn->parsed()) return cmd_bench(bn);
    if (c_sv->parsed()) return cmd_serve(sv);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("qfc");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace qfc::cli
