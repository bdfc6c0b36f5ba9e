#include "qfc/learn.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "qfc/error.hpp"
#include "qfc/eval.hpp"
#include "qfc/kernels.hpp"

namespace qfc {

namespace {

constexpr double kProbFloor = std::numeric_limits<double>::min();
const double kProbCeil = std::nextafter(1.0, 0.0);

double sigmoid(double z) {
  double p;
  if (z >= 0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
  }
  return std::clamp(p, kProbFloor, kProbCeil);
}

// log(1 + exp(-t)) without overflow.
double log1p_exp_neg(double t) { return t > 0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t)); }

// Training rows remapped onto the columns that actually occur, so the
// optimizer works on a dense vector of active features only.
struct CompactData {
  std::vector<std::uint32_t> hashed;  // compact column -> hashed index
  std::vector<std::size_t> row_ptr;
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  std::vector<double> sign;  // +1 / -1

  explicit CompactData(const TrainingSet& data) {
    std::unordered_map<std::uint32_t, std::uint32_t> remap;
    row_ptr.push_back(0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const FeatureVector& fv = data.features[i];
      for (std::size_t k = 0; k < fv.size(); ++k) {
        auto [it, fresh] = remap.try_emplace(fv.indices[k], static_cast<std::uint32_t>(hashed.size()));
        if (fresh) hashed.push_back(fv.indices[k]);
        cols.push_back(it->second);
        vals.push_back(fv.values[k]);
      }
      row_ptr.push_back(cols.size());
      sign.push_back(data.labels[i] ? 1.0 : -1.0);
    }
  }

  std::size_t rows() const { return sign.size(); }
  std::size_t dim() const { return hashed.size(); }
};

// Objective and gradient over theta = [w (compact), bias].
double objective(const CompactData& d, const std::vector<double>& theta, double c, std::vector<double>& grad) {
  const std::size_t m = d.dim();
  const std::span<const double> w(theta.data(), m);
  const double bias = theta[m];
  std::fill(grad.begin(), grad.end(), 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    const std::size_t b = d.row_ptr[i], e = d.row_ptr[i + 1];
    const double z = kernels::gather_dot(w, {d.cols.data() + b, e - b}, {d.vals.data() + b, e - b}) + bias;
    const double t = d.sign[i] * z;
    loss += log1p_exp_neg(t);
    // d/dz log(1 + exp(-s z)) = -s * sigmoid(-s z)
    const double coef = -d.sign[i] * (t >= 0 ? std::exp(-t) / (1.0 + std::exp(-t)) : 1.0 / (1.0 + std::exp(t)));
    for (std::size_t k = b; k < e; ++k) grad[d.cols[k]] += coef * d.vals[k];
    grad[m] += coef;
  }
  const double inv_c = 1.0 / c;
  loss += 0.5 * inv_c * kernels::dot(w, w);
  kernels::axpy(inv_c, w, std::span<double>(grad.data(), m));
  return loss;
}

}  // namespace

double predict(const LRModel& model, const FeatureVector& fv) {
  if (!fv.empty() && fv.indices.back() >= model.weights.size())
    throw ContractError("feature index beyond model dimension");
  return sigmoid(kernels::gather_dot(model.weights, fv.indices, fv.values) + model.bias);
}

long TrainingSet::positives() const { return std::count(labels.begin(), labels.end(), 1); }

TrainingSet build_training_set(const std::vector<Instance>& instances, const FeatureConfig& config,
                               const Lexicon& lexicon) {
  TrainingSet out;
  HashingSink sink(config.dim);
  for (const Instance& inst : instances) {
    for_each_oracle_decision(inst, [&](const CompressionState& s, Position v, int label) {
      featurize(s, v, config, lexicon, sink);
      out.features.push_back(sink.finish());
      out.labels.push_back(label);
    });
  }
  return out;
}

double logistic_objective(const TrainingSet& data, const std::vector<double>& weights, double bias, double c) {
  double loss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const FeatureVector& fv = data.features[i];
    double z = bias;
    for (std::size_t k = 0; k < fv.size(); ++k) z += weights[fv.indices[k]] * fv.values[k];
    loss += log1p_exp_neg(data.labels[i] ? z : -z);
  }
  double sq = 0.0;
  for (double w : weights) sq += w * w;
  return loss + 0.5 * sq / c;
}

LRModel train_lr(const TrainingSet& data, const FeatureConfig& config, Lexicon lexicon, const LROptions& options,
                 LRTrainStats* stats) {
  config.validate();
  if (!(options.c > 0)) throw ContractError("inverse regularization constant must be positive");
  const long pos = data.positives();
  if (pos == 0 || pos == static_cast<long>(data.size()))
    throw Error("logistic regression needs decisions of both labels (" + std::to_string(pos) + " of " +
                std::to_string(data.size()) + " positive)");

  const CompactData d(data);
  const std::size_t n = d.dim() + 1;
  std::vector<double> x(n, 0.0), g(n), x_new(n), g_new(n), dir(n);
  double f = objective(d, x, options.c, g);
  if (!std::isfinite(f)) throw Error("non-finite logistic loss at iteration 0");
  const double g0 = std::sqrt(kernels::dot(g, g));
  const double tol = options.grad_tolerance * std::max(1.0, g0);

  std::deque<std::pair<std::vector<double>, std::vector<double>>> hist;  // (s, y)
  std::deque<double> rho;
  LRTrainStats st;
  st.initial_loss = f;
  int it = 0;
  double gnorm = g0;
  for (; it < options.max_passes; ++it) {
    if (gnorm <= tol) {
      st.converged = true;
      break;
    }
    // Two-loop recursion.
    std::copy(g.begin(), g.end(), dir.begin());
    std::vector<double> alpha(hist.size());
    for (std::size_t k = hist.size(); k-- > 0;) {
      alpha[k] = rho[k] * kernels::dot(hist[k].first, dir);
      kernels::axpy(-alpha[k], hist[k].second, dir);
    }
    if (!hist.empty()) {
      const auto& [s, y] = hist.back();
      kernels::scale(kernels::dot(s, y) / kernels::dot(y, y), dir);
    }
    for (std::size_t k = 0; k < hist.size(); ++k) {
      const double beta = rho[k] * kernels::dot(hist[k].second, dir);
      kernels::axpy(alpha[k] - beta, hist[k].first, dir);
    }
    kernels::scale(-1.0, dir);
    double slope = kernels::dot(g, dir);
    if (!(slope < 0)) {
      hist.clear();
      rho.clear();
      std::transform(g.begin(), g.end(), dir.begin(), [](double v) { return -v; });
      slope = -gnorm * gnorm;
    }

    double step = hist.empty() ? 1.0 / std::max(1.0, gnorm) : 1.0;
    double f_new = 0.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      std::copy(x.begin(), x.end(), x_new.begin());
      kernels::axpy(step, dir, x_new);
      f_new = objective(d, x_new, options.c, g_new);
      if (!std::isfinite(f_new)) throw Error("non-finite logistic loss at iteration " + std::to_string(it + 1));
      if (f_new <= f + 1e-4 * step * slope) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;  // no further descent possible at machine precision

    std::vector<double> s(n), y(n);
    for (std::size_t k = 0; k < n; ++k) {
      s[k] = x_new[k] - x[k];
      y[k] = g_new[k] - g[k];
    }
    const double sy = kernels::dot(s, y);
    if (sy > 1e-12) {
      if (static_cast<int>(hist.size()) == options.history) {
        hist.pop_front();
        rho.pop_front();
      }
      hist.emplace_back(std::move(s), std::move(y));
      rho.push_back(1.0 / sy);
    }
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    gnorm = std::sqrt(kernels::dot(g, g));
  }
  if (!st.converged && gnorm <= tol) st.converged = true;

  LRModel model;
  model.config = config;
  model.lexicon = std::move(lexicon);
  model.inverse_reg_c = options.c;
  model.weights.assign(config.dim, 0.0);
  for (std::size_t k = 0; k < d.dim(); ++k) model.weights[d.hashed[k]] = x[k];
  model.bias = x[d.dim()];

  st.iterations = it;
  st.final_loss = f;
  st.final_grad_norm = gnorm;
  if (stats) *stats = st;
  return model;
}

double LRDecisionModel::score(const CompressionState& state, Position candidate) const {
  HashingSink sink(model_->config.dim);
  featurize(state, candidate, model_->config, model_->lexicon, sink);
  return predict(*model_, sink.finish());
}

// ---------------------------------------------------------------------------

RandomPolicy::RandomPolicy(double accept_prob, std::uint64_t seed)
    : accept_prob_(accept_prob), seed_(seed), rng_(seed) {
  if (!(accept_prob >= 0.0 && accept_prob <= 1.0)) throw ContractError("accept probability must lie in [0, 1]");
}

void RandomPolicy::reseed(std::uint64_t seed) {
  seed_ = seed;
  rng_.seed(seed);
}

double RandomPolicy::score(const CompressionState&, Position) const {
  // 53-bit uniform in [0, 1); identical across standard libraries.
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return u < accept_prob_ ? 1.0 : 0.0;
}

RandomPolicy fit_random_policy(const std::vector<int>& labels, std::uint64_t seed) {
  if (labels.empty()) throw Error("cannot fit a random policy to zero decisions");
  const auto pos = std::count(labels.begin(), labels.end(), 1);
  return RandomPolicy(static_cast<double>(pos) / static_cast<double>(labels.size()), seed);
}

GridResult grid_search_c(const TrainingSet& data, const FeatureConfig& config, const Lexicon& lexicon,
                         const std::vector<Instance>& validation, const std::vector<double>& grid) {
  if (grid.empty()) throw ContractError("empty c grid");
  GridResult out;
  out.grid = grid;
  double best = -1.0;
  for (double c : grid) {
    LROptions opt;
    opt.c = c;
    const LRModel model = train_lr(data, config, lexicon, opt);
    const LRDecisionModel dm(model);
    double sum = 0.0;
    for (const Instance& inst : validation) sum += token_f1(compress(inst, dm), *inst.gold).f1;
    const double f1 = validation.empty() ? 0.0 : sum / static_cast<double>(validation.size());
    out.f1.push_back(f1);
    if (f1 > best) {
      best = f1;
      out.best_c = c;
    }
  }
  return out;
}

}  // namespace qfc
