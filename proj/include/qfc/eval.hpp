#pragma once

// Token F1, compression ratio, SLOR aggregation, latency benchmarking and
// paired bootstrap significance.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfc/corpus.hpp"
#include "qfc/lm.hpp"

namespace qfc {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Set-overlap precision/recall/F1 over token positions. Throws
/// ContractError on an empty gold set; empty pred gives (0, 0, 0).
PRF token_f1(const VertexSet& pred, const VertexSet& gold);

/// ℓ(pred) / ℓ(S). Throws ContractError on an empty prediction.
double compression_ratio(const VertexSet& pred, const ParseGraph& g);

/// A compression system under evaluation. Must be safe to call repeatedly.
using System = std::function<VertexSet(const Instance&)>;

struct LatencyResult {
  double mean_ms = 0.0;
  double stddev_ms = 0.0;
  std::size_t samples = 0;
};

/// Times `samples` compressions of instances drawn with replacement after
/// `warmup` unmeasured calls. Throws ContractError on an empty corpus.
LatencyResult latency_bench(const System& system, const std::vector<Instance>& corpus, std::size_t samples,
                            std::uint64_t seed, std::size_t warmup = 100);

struct BootstrapResult {
  double mean_a = 0.0;
  double mean_b = 0.0;
  /// Evidence that a > b: (1 + #{resampled mean(a) - mean(b) <= 0}) / (R + 1).
  double p_one_sided = 1.0;
  /// min(1, 2 * min(p(a > b), p(b > a))).
  double p_two_sided = 1.0;
  int resamples = 0;
};

/// Paired bootstrap over instances drawn with replacement. Deterministic
/// under the seed. Throws ContractError on length mismatch or fewer than
/// two items.
BootstrapResult paired_bootstrap(std::span<const double> a, std::span<const double> b, int resamples = 10000,
                                 std::uint64_t seed = 1);

struct InstanceRow {
  std::string id;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double ratio = 0.0;
  std::optional<double> slor;
  double latency_ms = 0.0;
  std::string text;
  std::string error;  // nonempty when the system failed on this instance
};

struct SystemReport {
  std::string name;
  std::vector<InstanceRow> rows;
  double mean_f1 = 0.0;
  double mean_ratio = 0.0;
  std::optional<double> mean_slor;
  double mean_latency_ms = 0.0;
  int failures = 0;
};

struct SignificanceEntry {
  std::string metric;
  std::string system_a;
  std::string system_b;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double p_one_sided = 1.0;
  double p_two_sided = 1.0;
};

struct EvalReport {
  std::vector<SystemReport> systems;
  std::vector<SignificanceEntry> significance;
};

/// Compresses every instance (all need gold), recording per-instance
/// metrics; a system failure is recorded on its row, not rethrown. SLOR is
/// filled when `lm` is given. Throws ContractError on an empty list.
SystemReport evaluate_suite(const std::string& name, const System& system, const std::vector<Instance>& instances,
                            const TrigramLM* lm = nullptr);

/// Adds pairwise significance (f1, and slor when present) for every
/// ordered pair of systems.
void add_significance(EvalReport& report, int resamples, std::uint64_t seed);

inline constexpr const char* kReportSchema = "qfc-eval/1";

/// Timing values live under "timing" keys so determinism checks can drop them.
nlohmann::json report_to_json(const EvalReport& report);
/// One row per (system, instance).
std::string report_to_tsv(const EvalReport& report);

/// Uniform integer in [0, n) from a 64-bit engine draw (multiply-high),
/// identical on every standard library.
std::uint64_t uniform_below(std::uint64_t draw, std::uint64_t n) noexcept;

}  // namespace qfc
