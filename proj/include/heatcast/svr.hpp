#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "heatcast/features.hpp"

namespace heatcast::svr {

struct SvrParams {
  double c = 1.0;        // regularization weight, > 0
  double epsilon = 0.1;  // tube half-width in scaled-target units, >= 0
  double gamma = 0.125;  // RBF kernel parameter, > 0

  bool operator==(const SvrParams&) const = default;
};

// Solver snapshot handed to checkpoint observers and to kkt_violation.
// beta_i = alpha_i - alpha_i*; the split into (alpha, alpha*) keeps
// complementarity exact by construction.
struct TrainState {
  std::uint64_t iterations = 0;
  std::vector<double> beta;
  std::vector<double> kernel_output;  // f_i = sum_j beta_j K(x_j, x_i), bias excluded
  std::vector<double> targets;
  double c = 0.0;
  double epsilon = 0.0;
  double dual_objective = 0.0;
  double violation = 0.0;  // maximal violating-pair gap

  std::vector<double> alpha() const;
  std::vector<double> alpha_star() const;
};

struct TrainOptions {
  double tolerance = 1e-3;
  std::uint64_t max_iterations = 10'000'000;
  // Full Gram matrix is precomputed at or below this row count (covers the
  // 12-day relevant matrices); larger problems use an LRU row cache.
  std::size_t dense_gram_limit = 2048;
  std::size_t kernel_cache_mb = 100;
  std::uint64_t checkpoint_interval = 0;  // 0 disables checkpoints
  std::function<void(const TrainState&)> on_checkpoint;
  // Optional precomputed ||x_i - x_j||^2 matrix (row-major n*n), shared
  // across grid cells that train on the same scaled fold.
  std::shared_ptr<const std::vector<double>> pairwise_sqdist;
};

struct ConvergenceInfo {
  std::uint64_t iterations = 0;
  double kkt_violation = 0.0;
  bool iteration_cap_hit = false;
  double dual_objective = 0.0;
};

struct SvrModel {
  std::size_t dim = 0;
  std::vector<double> support_values;  // row-major, support_count x dim
  std::vector<double> coefficients;    // beta per retained support vector
  double bias = 0.0;
  SvrParams params;
  data::Scaler scaler;
  ConvergenceInfo convergence;

  std::size_t support_count() const { return coefficients.size(); }
};

double rbf_kernel(std::span<const double> x, std::span<const double> z, double gamma);

std::shared_ptr<const std::vector<double>> pairwise_squared_distances(
    const features::FeatureMatrix& matrix);

// Two-variable SMO on the epsilon-SVR dual: maximal violating pair selection
// with lowest-index tie-breaking, exact line search per step, stop when the
// pair gap drops below the tolerance.
SvrModel train_svr(const features::FeatureMatrix& scaled_matrix, const SvrParams& params,
                   const TrainOptions& options = {});

// Kernel expansion plus bias, inverse-scaled to kW. Rows must be scaled with
// the model's own scaler.
std::vector<double> predict(const SvrModel& model, const features::FeatureMatrix& scaled_rows);

// Same expansion in scaled-target units for a single row.
double predict_scaled_row(const SvrModel& model, std::span<const double> scaled_row);

// Maximal violating-pair gap; zero at the exact dual optimum.
double kkt_violation(const TrainState& state);

std::string model_to_json(const SvrModel& model);
SvrModel model_from_json(const std::string& text);
void save_model(const SvrModel& model, const std::string& path);
SvrModel load_model(const std::string& path);

}  // namespace heatcast::svr
