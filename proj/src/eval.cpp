#include "qfc/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "qfc/error.hpp"
#include "qfc/kernels.hpp"

namespace qfc {

using nlohmann::json;

std::uint64_t uniform_below(std::uint64_t draw, std::uint64_t n) noexcept {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(draw) * n) >> 64);
}

PRF token_f1(const VertexSet& pred, const VertexSet& gold) {
  if (gold.empty()) throw ContractError("token F1 needs a nonempty gold set");
  if (pred.empty()) return {};
  std::size_t common = 0;
  auto p = pred.begin();
  auto g = gold.begin();
  while (p != pred.end() && g != gold.end()) {
    if (*p < *g)
      ++p;
    else if (*g < *p)
      ++g;
    else {
      ++common;
      ++p;
      ++g;
    }
  }
  if (common == 0) return {};
  PRF out;
  out.precision = static_cast<double>(common) / static_cast<double>(pred.size());
  out.recall = static_cast<double>(common) / static_cast<double>(gold.size());
  out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

double compression_ratio(const VertexSet& pred, const ParseGraph& g) {
  if (pred.empty()) throw ContractError("compression ratio of an empty prediction");
  return static_cast<double>(linear_length(g, pred)) / static_cast<double>(g.char_len());
}

LatencyResult latency_bench(const System& system, const std::vector<Instance>& corpus, std::size_t samples,
                            std::uint64_t seed, std::size_t warmup) {
  if (corpus.empty()) throw ContractError("latency benchmark needs a nonempty corpus");
  if (samples == 0) throw ContractError("latency benchmark needs at least one sample");
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < warmup; ++i) system(corpus[uniform_below(rng(), corpus.size())]);

  using clock = std::chrono::steady_clock;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Instance& inst = corpus[uniform_below(rng(), corpus.size())];
    const auto t0 = clock::now();
    const VertexSet out = system(inst);
    const auto t1 = clock::now();
    const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    sum += ms;
    sum_sq += ms * ms;
  }
  LatencyResult r;
  r.samples = samples;
  r.mean_ms = sum / static_cast<double>(samples);
  const double var = samples > 1 ? (sum_sq - sum * r.mean_ms) / static_cast<double>(samples - 1) : 0.0;
  r.stddev_ms = std::sqrt(std::max(0.0, var));
  return r;
}

BootstrapResult paired_bootstrap(std::span<const double> a, std::span<const double> b, int resamples,
                                 std::uint64_t seed) {
  if (a.size() != b.size())
    throw ContractError("paired bootstrap needs equal lengths, got " + std::to_string(a.size()) + " and " +
                        std::to_string(b.size()));
  if (a.size() < 2) throw ContractError("paired bootstrap needs at least two items");
  if (resamples < 1) throw ContractError("paired bootstrap needs at least one resample");

  const std::size_t n = a.size();
  std::vector<double> diff(n);
  BootstrapResult r;
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = a[i] - b[i];
    r.mean_a += a[i];
    r.mean_b += b[i];
  }
  r.mean_a /= static_cast<double>(n);
  r.mean_b /= static_cast<double>(n);

  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> idx(n);
  long not_a = 0, not_b = 0;  // resamples where a fails to beat b, and vice versa
  for (int k = 0; k < resamples; ++k) {
    for (auto& i : idx) i = static_cast<std::uint32_t>(uniform_below(rng(), n));
    const double s = kernels::gather_sum(diff, idx);
    not_a += s <= 0.0;
    not_b += s >= 0.0;
  }
  const double denom = static_cast<double>(resamples) + 1.0;
  r.resamples = resamples;
  r.p_one_sided = (static_cast<double>(not_a) + 1.0) / denom;
  const double p_b = (static_cast<double>(not_b) + 1.0) / denom;
  r.p_two_sided = std::min(1.0, 2.0 * std::min(r.p_one_sided, p_b));
  return r;
}

SystemReport evaluate_suite(const std::string& name, const System& system, const std::vector<Instance>& instances,
                            const TrigramLM* lm) {
  if (instances.empty()) throw ContractError("evaluation needs at least one instance");
  SystemReport rep;
  rep.name = name;
  double f1 = 0.0, ratio = 0.0, slor = 0.0, latency = 0.0;
  int slor_n = 0;
  using clock = std::chrono::steady_clock;
  for (const Instance& inst : instances) {
    if (!inst.gold) throw ContractError("instance " + inst.id + " has no gold compression");
    InstanceRow row;
    row.id = inst.id;
    try {
      const auto t0 = clock::now();
      const VertexSet pred = system(inst);
      row.latency_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
      const PRF prf = token_f1(pred, *inst.gold);
      row.precision = prf.precision;
      row.recall = prf.recall;
      row.f1 = prf.f1;
      row.ratio = pred.empty() ? 0.0 : compression_ratio(pred, *inst.graph);
      row.text = linearize(*inst.graph, pred).text;
      if (lm && !pred.empty()) {
        row.slor = lm->slor(lm_tokens(row.text));
        slor += *row.slor;
        ++slor_n;
      }
    } catch (const std::exception& e) {
      row.error = e.what();
      ++rep.failures;
    }
    f1 += row.f1;
    ratio += row.ratio;
    latency += row.latency_ms;
    rep.rows.push_back(std::move(row));
  }
  const double n = static_cast<double>(instances.size());
  rep.mean_f1 = f1 / n;
  rep.mean_ratio = ratio / n;
  rep.mean_latency_ms = latency / n;
  if (slor_n > 0) rep.mean_slor = slor / slor_n;
  return rep;
}

void add_significance(EvalReport& report, int resamples, std::uint64_t seed) {
  const auto column = [](const SystemReport& s, const std::string& metric, std::vector<double>& out) {
    out.clear();
    for (const InstanceRow& r : s.rows) {
      if (metric == "f1")
        out.push_back(r.f1);
      else if (r.slor)
        out.push_back(*r.slor);
      else
        return false;
    }
    return true;
  };
  std::vector<double> a, b;
  for (std::size_t i = 0; i < report.systems.size(); ++i)
    for (std::size_t j = 0; j < report.systems.size(); ++j) {
      if (i == j) continue;
      for (const std::string metric : {"f1", "slor"}) {
        if (!column(report.systems[i], metric, a) || !column(report.systems[j], metric, b)) continue;
        if (a.size() != b.size() || a.size() < 2) continue;
        const BootstrapResult r = paired_bootstrap(a, b, resamples, seed);
        report.significance.push_back({metric, report.systems[i].name, report.systems[j].name, r.mean_a, r.mean_b,
                                       r.p_one_sided, r.p_two_sided});
      }
    }
}

json report_to_json(const EvalReport& report) {
  json systems = json::array();
  for (const SystemReport& s : report.systems) {
    json rows = json::array();
    for (const InstanceRow& r : s.rows) {
      json row = {{"id", r.id},         {"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1},
                  {"ratio", r.ratio},   {"text", r.text},           {"slor", nullptr},    {"timing", {{"latency_ms", r.latency_ms}}}};
      if (r.slor) row["slor"] = *r.slor;
      if (!r.error.empty()) row["error"] = r.error;
      rows.push_back(std::move(row));
    }
    json sys = {{"name", s.name},
                {"mean_f1", s.mean_f1},
                {"mean_ratio", s.mean_ratio},
                {"mean_slor", nullptr},
                {"failures", s.failures},
                {"timing", {{"mean_latency_ms", s.mean_latency_ms}}},
                {"rows", std::move(rows)}};
    if (s.mean_slor) sys["mean_slor"] = *s.mean_slor;
    systems.push_back(std::move(sys));
  }
  json sig = json::array();
  for (const SignificanceEntry& e : report.significance)
    sig.push_back({{"metric", e.metric},
                   {"system_a", e.system_a},
                   {"system_b", e.system_b},
                   {"mean_a", e.mean_a},
                   {"mean_b", e.mean_b},
                   {"p_value", e.p_one_sided},
                   {"p_two_sided", e.p_two_sided}});
  return {{"schema", kReportSchema}, {"systems", std::move(systems)}, {"significance", std::move(sig)}};
}

std::string report_to_tsv(const EvalReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "system\tid\tprecision\trecall\tf1\tratio\tslor\n";
  for (const SystemReport& s : report.systems)
    for (const InstanceRow& r : s.rows) {
      os << s.name << '\t' << r.id << '\t' << r.precision << '\t' << r.recall << '\t' << r.f1 << '\t' << r.ratio
         << '\t';
      if (r.slor)
        os << *r.slor;
      else
        os << "NA";
      os << '\n';
    }
  return os.str();
}

}  // namespace qfc
