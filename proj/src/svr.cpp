#include "heatcast/svr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace heatcast::svr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTau = 1e-12;  // curvature floor for degenerate pairs

double squared_distance(std::span<const double> x, std::span<const double> z) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - z[i];
    s += d * d;
  }
  return s;
}

// Kernel row access behind the solver. Dense variant holds the whole Gram
// matrix; the cache variant recomputes rows on demand with a bounded LRU,
// which is what makes whole-data training pay for its size.
class KernelProvider {
public:
  virtual ~KernelProvider() = default;
  virtual const double* row(std::size_t i) = 0;
};

class DenseGram : public KernelProvider {
public:
  DenseGram(const features::FeatureMatrix& matrix, double gamma,
            const std::shared_ptr<const std::vector<double>>& sqdist) {
    const std::size_t n = matrix.rows();
    gram_.resize(n * n);
    if (sqdist && sqdist->size() == n * n) {
      for (std::size_t i = 0; i < n * n; ++i) gram_[i] = std::exp(-gamma * (*sqdist)[i]);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        gram_[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
          const double k = std::exp(-gamma * squared_distance(matrix.row(i), matrix.row(j)));
          gram_[i * n + j] = k;
          gram_[j * n + i] = k;
        }
      }
    }
    n_ = n;
  }

  const double* row(std::size_t i) override { return gram_.data() + i * n_; }

private:
  std::size_t n_ = 0;
  std::vector<double> gram_;
};

class RowCacheKernel : public KernelProvider {
public:
  RowCacheKernel(const features::FeatureMatrix& matrix, double gamma, std::size_t budget_mb)
      : matrix_(matrix), gamma_(gamma), n_(matrix.rows()) {
    const std::size_t row_bytes = n_ * sizeof(double);
    std::size_t capacity = (budget_mb << 20) / std::max<std::size_t>(row_bytes, 1);
    capacity = std::clamp<std::size_t>(capacity, 3, n_);
    slots_.resize(capacity);
    for (auto& slot : slots_) slot.values.resize(n_);
    slot_of_.assign(n_, kNoSlot);
  }

  const double* row(std::size_t i) override {
    std::size_t s = slot_of_[i];
    if (s == kNoSlot) {
      s = evict_slot();
      if (slots_[s].owner != kNoSlot) slot_of_[slots_[s].owner] = kNoSlot;
      slots_[s].owner = i;
      slot_of_[i] = s;
      compute_row(i, slots_[s].values.data());
    }
    slots_[s].stamp = ++clock_;
    last_two_[0] = last_two_[1];
    last_two_[1] = s;
    return slots_[s].values.data();
  }

private:
  static constexpr std::size_t kNoSlot = static_cast<std::size_t>(-1);

  struct Slot {
    std::vector<double> values;
    std::size_t owner = kNoSlot;
    std::uint64_t stamp = 0;
  };

  void compute_row(std::size_t i, double* out) const {
    const auto xi = matrix_.row(i);
    for (std::size_t j = 0; j < n_; ++j) {
      out[j] = std::exp(-gamma_ * squared_distance(xi, matrix_.row(j)));
    }
  }

  // Least recently used slot, never one of the two rows the current SMO step
  // is still holding.
  std::size_t evict_slot() {
    std::size_t best = kNoSlot;
    std::uint64_t best_stamp = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      if (s == last_two_[0] || s == last_two_[1]) continue;
      if (slots_[s].owner == kNoSlot) return s;
      if (slots_[s].stamp < best_stamp) {
        best_stamp = slots_[s].stamp;
        best = s;
      }
    }
    return best;
  }

  const features::FeatureMatrix& matrix_;
  double gamma_;
  std::size_t n_;
  std::vector<Slot> slots_;
  std::vector<std::size_t> slot_of_;
  std::size_t last_two_[2] = {kNoSlot, kNoSlot};
  std::uint64_t clock_ = 0;
};

struct PairChoice {
  int up = -1;
  int down = -1;
  double gap = -kInf;
};

class SmoSolver {
public:
  SmoSolver(const features::FeatureMatrix& matrix, const SvrParams& params,
            const TrainOptions& options)
      : matrix_(matrix),
        params_(params),
        options_(options),
        n_(matrix.rows()),
        y_(matrix.targets()),
        beta_(matrix.rows(), 0.0),
        f_(matrix.rows(), 0.0) {
    // the row cache needs headroom beyond the two pinned rows
    if (n_ <= options.dense_gram_limit || n_ <= 4) {
      kernel_ = std::make_unique<DenseGram>(matrix, params.gamma, options.pairwise_sqdist);
    } else {
      kernel_ = std::make_unique<RowCacheKernel>(matrix, params.gamma, options.kernel_cache_mb);
    }
  }

  ConvergenceInfo solve() {
    const double tol = options_.tolerance;
    while (true) {
      const PairChoice pair = select_pair();
      violation_ = std::max(0.0, pair.gap);
      if (pair.gap < tol || pair.up < 0 || pair.down < 0) break;
      if (iterations_ >= options_.max_iterations) {
        cap_hit_ = true;
        break;
      }
      step(pair);
      ++iterations_;
      if (options_.checkpoint_interval > 0 && options_.on_checkpoint &&
          iterations_ % options_.checkpoint_interval == 0) {
        options_.on_checkpoint(snapshot());
      }
    }
    ConvergenceInfo info;
    info.iterations = iterations_;
    info.kkt_violation = violation_;
    info.iteration_cap_hit = cap_hit_;
    info.dual_objective = dual_objective();
    return info;
  }

  // Candidate "up" rate for raising beta_i and "down" value for lowering it.
  // The epsilon term flips sign with the |beta| branch; steps are clipped at
  // the zero crossing so each move stays inside one linear piece.
  PairChoice select_pair() const {
    const double c = params_.c;
    const double eps = params_.epsilon;
    PairChoice pair;
    double best_up = -kInf, best_down = kInf;
    for (std::size_t i = 0; i < n_; ++i) {
      const double r = y_[i] - f_[i];
      const double b = beta_[i];
      if (b < c) {
        const double up = b >= 0.0 ? r - eps : r + eps;
        if (up > best_up) {
          best_up = up;
          pair.up = static_cast<int>(i);
        }
      }
      if (b > -c) {
        const double down = b > 0.0 ? r - eps : r + eps;
        if (down < best_down) {
          best_down = down;
          pair.down = static_cast<int>(i);
        }
      }
    }
    pair.gap = best_up - best_down;
    return pair;
  }

  void step(const PairChoice& pair) {
    const std::size_t i = static_cast<std::size_t>(pair.up);
    const std::size_t j = static_cast<std::size_t>(pair.down);
    const double c = params_.c;

    const double* ki = kernel_->row(i);
    const double* kj = kernel_->row(j);
    const double eta = std::max(ki[i] + kj[j] - 2.0 * ki[j], kTau);

    const double limit_i = beta_[i] < 0.0 ? -beta_[i] : c - beta_[i];
    const double limit_j = beta_[j] > 0.0 ? beta_[j] : beta_[j] + c;
    const double delta = std::min({pair.gap / eta, limit_i, limit_j});

    const double old_i = beta_[i];
    const double old_j = beta_[j];
    if (delta >= limit_i) {
      beta_[i] = old_i < 0.0 ? 0.0 : c;  // land exactly on the branch/box edge
    } else {
      beta_[i] = old_i + delta;
    }
    if (delta >= limit_j) {
      beta_[j] = old_j > 0.0 ? 0.0 : -c;
    } else {
      beta_[j] = old_j - delta;
    }

    const double di = beta_[i] - old_i;
    const double dj = beta_[j] - old_j;
    for (std::size_t t = 0; t < n_; ++t) f_[t] += di * ki[t] + dj * kj[t];
  }

  double dual_objective() const {
    double obj = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      obj += y_[i] * beta_[i] - 0.5 * beta_[i] * f_[i] - params_.epsilon * std::abs(beta_[i]);
    }
    return obj;
  }

  // Bias from free support vectors when any exist, otherwise the midpoint of
  // the feasible interval the bound/zero samples leave for it.
  double bias() const {
    const double c = params_.c;
    const double eps = params_.epsilon;
    double free_sum = 0.0;
    std::size_t free_count = 0;
    double lo = -kInf, hi = kInf;
    for (std::size_t i = 0; i < n_; ++i) {
      const double r = y_[i] - f_[i];
      const double b = beta_[i];
      if (b > 0.0 && b < c) {
        free_sum += r - eps;
        ++free_count;
      } else if (b < 0.0 && b > -c) {
        free_sum += r + eps;
        ++free_count;
      } else if (b == 0.0) {
        lo = std::max(lo, r - eps);
        hi = std::min(hi, r + eps);
      } else if (b >= c) {
        hi = std::min(hi, r - eps);
      } else {  // b <= -c
        lo = std::max(lo, r + eps);
      }
    }
    if (free_count > 0) return free_sum / static_cast<double>(free_count);
    if (lo == -kInf && hi == kInf) return 0.0;
    if (lo == -kInf) return hi;
    if (hi == kInf) return lo;
    return 0.5 * (lo + hi);
  }

  TrainState snapshot() const {
    TrainState state;
    state.iterations = iterations_;
    state.beta = beta_;
    state.kernel_output = f_;
    state.targets = y_;
    state.c = params_.c;
    state.epsilon = params_.epsilon;
    state.dual_objective = dual_objective();
    state.violation = std::max(0.0, select_pair().gap);
    return state;
  }

  const std::vector<double>& beta() const { return beta_; }

private:
  const features::FeatureMatrix& matrix_;
  SvrParams params_;
  const TrainOptions& options_;
  std::size_t n_;
  std::vector<double> y_;
  std::vector<double> beta_;
  std::vector<double> f_;
  std::unique_ptr<KernelProvider> kernel_;
  std::uint64_t iterations_ = 0;
  double violation_ = 0.0;
  bool cap_hit_ = false;
};

}  // namespace

std::vector<double> TrainState::alpha() const {
  std::vector<double> a(beta.size());
  for (std::size_t i = 0; i < beta.size(); ++i) a[i] = std::max(beta[i], 0.0);
  return a;
}

std::vector<double> TrainState::alpha_star() const {
  std::vector<double> a(beta.size());
  for (std::size_t i = 0; i < beta.size(); ++i) a[i] = std::max(-beta[i], 0.0);
  return a;
}

double rbf_kernel(std::span<const double> x, std::span<const double> z, double gamma) {
  if (x.size() != z.size()) {
    raise(Errc::dimension_mismatch, "rbf_kernel: dimensions " + std::to_string(x.size()) +
                                        " vs " + std::to_string(z.size()));
  }
  return std::exp(-gamma * squared_distance(x, z));
}

std::shared_ptr<const std::vector<double>> pairwise_squared_distances(
    const features::FeatureMatrix& matrix) {
  const std::size_t n = matrix.rows();
  auto out = std::make_shared<std::vector<double>>(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = squared_distance(matrix.row(i), matrix.row(j));
      (*out)[i * n + j] = d;
      (*out)[j * n + i] = d;
    }
  }
  return out;
}

SvrModel train_svr(const features::FeatureMatrix& matrix, const SvrParams& params,
                   const TrainOptions& options) {
  if (!matrix.scaled()) raise(Errc::not_scaled, "train_svr: matrix must be scaled first");
  if (!matrix.has_targets()) raise(Errc::invalid_config, "train_svr: matrix has no targets");
  if (matrix.rows() < 2) raise(Errc::too_few_samples, "train_svr: need at least 2 rows");
  if (params.c <= 0.0 || params.gamma <= 0.0 || params.epsilon < 0.0) {
    raise(Errc::invalid_config, "train_svr: C and gamma must be positive, epsilon >= 0");
  }
  for (double v : matrix.values()) {
    if (std::isnan(v)) raise(Errc::singular_input, "train_svr: NaN feature value");
  }
  for (double y : matrix.targets()) {
    if (std::isnan(y)) raise(Errc::singular_input, "train_svr: NaN target value");
  }

  SmoSolver solver(matrix, params, options);
  SvrModel model;
  model.convergence = solver.solve();
  model.dim = matrix.cols();
  model.bias = solver.bias();
  model.params = params;
  model.scaler = *matrix.scaler();

  const auto& beta = solver.beta();
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (beta[i] == 0.0) continue;
    model.coefficients.push_back(beta[i]);
    const auto row = matrix.row(i);
    model.support_values.insert(model.support_values.end(), row.begin(), row.end());
  }
  return model;
}

double predict_scaled_row(const SvrModel& model, std::span<const double> scaled_row) {
  if (scaled_row.size() != model.dim) {
    raise(Errc::dimension_mismatch, "predict: row has " + std::to_string(scaled_row.size()) +
                                        " features, model expects " + std::to_string(model.dim));
  }
  double f = model.bias;
  for (std::size_t s = 0; s < model.support_count(); ++s) {
    std::span<const double> sv(model.support_values.data() + s * model.dim, model.dim);
    f += model.coefficients[s] * std::exp(-model.params.gamma * squared_distance(sv, scaled_row));
  }
  return f;
}

std::vector<double> predict(const SvrModel& model, const features::FeatureMatrix& scaled_rows) {
  if (!scaled_rows.scaled() || !(*scaled_rows.scaler() == model.scaler)) {
    raise(Errc::scaler_mismatch, "predict: rows were not scaled with the model's scaler");
  }
  std::vector<double> out;
  out.reserve(scaled_rows.rows());
  for (std::size_t i = 0; i < scaled_rows.rows(); ++i) {
    out.push_back(model.scaler.unscale_target(predict_scaled_row(model, scaled_rows.row(i))));
  }
  return out;
}

double kkt_violation(const TrainState& state) {
  const double c = state.c;
  const double eps = state.epsilon;
  double best_up = -kInf, best_down = kInf;
  for (std::size_t i = 0; i < state.beta.size(); ++i) {
    const double r = state.targets[i] - state.kernel_output[i];
    const double b = state.beta[i];
    if (b < c) best_up = std::max(best_up, b >= 0.0 ? r - eps : r + eps);
    if (b > -c) best_down = std::min(best_down, b > 0.0 ? r - eps : r + eps);
  }
  return std::max(0.0, best_up - best_down);
}

namespace {

nlohmann::json scaler_to_json(const data::Scaler& scaler) {
  std::vector<double> means, stds;
  for (std::size_t j = 0; j < scaler.cols(); ++j) {
    means.push_back(scaler.feature_mean(j));
    stds.push_back(scaler.feature_std(j));
  }
  return nlohmann::json{{"feature_mean", means},
                        {"feature_std", stds},
                        {"target_mean", scaler.target_mean()},
                        {"target_std", scaler.target_std()},
                        {"has_target_stats", scaler.has_target_stats()},
                        {"degenerate_columns", scaler.degenerate_columns()}};
}

data::Scaler scaler_from_json(const nlohmann::json& doc) {
  return data::Scaler::from_stats(
      doc.at("feature_mean").get<std::vector<double>>(),
      doc.at("feature_std").get<std::vector<double>>(), doc.at("target_mean").get<double>(),
      doc.at("target_std").get<double>(), doc.at("has_target_stats").get<bool>(),
      doc.at("degenerate_columns").get<std::vector<std::size_t>>());
}

}  // namespace

std::string model_to_json(const SvrModel& model) {
  nlohmann::ordered_json doc;
  doc["format"] = "heatcast-svr-model";
  doc["version"] = 1;
  doc["params"] = {{"c", model.params.c},
                   {"epsilon", model.params.epsilon},
                   {"gamma", model.params.gamma}};
  doc["dim"] = model.dim;
  doc["bias"] = model.bias;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t s = 0; s < model.support_count(); ++s) {
    rows.push_back(std::vector<double>(model.support_values.begin() + s * model.dim,
                                       model.support_values.begin() + (s + 1) * model.dim));
  }
  doc["support_vectors"] = rows;
  doc["coefficients"] = model.coefficients;
  doc["scaler"] = scaler_to_json(model.scaler);
  doc["convergence"] = {{"iterations", model.convergence.iterations},
                        {"kkt_violation", model.convergence.kkt_violation},
                        {"iteration_cap_hit", model.convergence.iteration_cap_hit},
                        {"dual_objective", model.convergence.dual_objective}};
  return doc.dump(2);
}

SvrModel model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    raise(Errc::invalid_config, std::string("model JSON: ") + e.what());
  }
  if (doc.value("format", "") != "heatcast-svr-model" || doc.value("version", 0) != 1) {
    raise(Errc::invalid_config, "model JSON: unknown format or version");
  }
  SvrModel model;
  model.params.c = doc.at("params").at("c").get<double>();
  model.params.epsilon = doc.at("params").at("epsilon").get<double>();
  model.params.gamma = doc.at("params").at("gamma").get<double>();
  model.dim = doc.at("dim").get<std::size_t>();
  model.bias = doc.at("bias").get<double>();
  for (const auto& row : doc.at("support_vectors")) {
    const auto values = row.get<std::vector<double>>();
    if (values.size() != model.dim) {
      raise(Errc::invalid_config, "model JSON: support vector dimension mismatch");
    }
    model.support_values.insert(model.support_values.end(), values.begin(), values.end());
  }
  model.coefficients = doc.at("coefficients").get<std::vector<double>>();
  if (model.coefficients.size() * model.dim != model.support_values.size()) {
    raise(Errc::invalid_config, "model JSON: coefficient/support count mismatch");
  }
  model.scaler = scaler_from_json(doc.at("scaler"));
  model.convergence.iterations = doc.at("convergence").at("iterations").get<std::uint64_t>();
  model.convergence.kkt_violation = doc.at("convergence").at("kkt_violation").get<double>();
  model.convergence.iteration_cap_hit =
      doc.at("convergence").at("iteration_cap_hit").get<bool>();
  model.convergence.dual_objective = doc.at("convergence").at("dual_objective").get<double>();
  return model;
}

void save_model(const SvrModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(Errc::io_failure, "cannot write " + path);
  out << model_to_json(model) << "\n";
  if (!out) raise(Errc::io_failure, "failed writing " + path);
}

SvrModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_failure, "cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace heatcast::svr
