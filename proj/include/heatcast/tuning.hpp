#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "heatcast/svr.hpp"

namespace heatcast::tuning {

// Hyperparameter grid, evaluated in row-major C -> gamma -> epsilon order.
struct GridSpec {
  std::vector<double> c_values;
  std::vector<double> gamma_values;
  std::vector<double> epsilon_values;

  static GridSpec relevant_preset();  // C 2^-5..2^5, gamma 2^-15..2^15, eps {.001,.01,.1,.2,.5}
  static GridSpec whole_preset();     // C extended to 2^15, same gamma and eps sets
  static GridSpec load(const std::string& path);
  // "relevant" | "whole" | path to a JSON override file.
  static GridSpec named_or_file(const std::string& name);

  std::size_t size() const {
    return c_values.size() * gamma_values.size() * epsilon_values.size();
  }
  svr::SvrParams cell(std::size_t index) const;
};

double r2(std::span<const double> actual, std::span<const double> predicted);
double rmse(std::span<const double> actual, std::span<const double> predicted);
double pearson_r(std::span<const double> x, std::span<const double> y);

// Disjoint index folds covering 0..n-1, sizes differing by at most one,
// deterministic in the seed. With block > 1 whole blocks are dealt to folds
// (day-blocked splitting for 96-row day matrices).
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k, std::uint64_t seed,
                                                  std::size_t block = 1);

enum class FoldMode { day_blocked, rows };

struct CvResult {
  svr::SvrParams params;
  std::vector<double> fold_r2;   // NaN for folds with degenerate actuals
  std::vector<double> fold_rmse;
  double mean_r2 = 0.0;
  double mean_rmse = 0.0;
  double train_ms = 0.0;
  bool iteration_cap_hit = false;
};

// Tie chain: min mean RMSE, then max mean R2, then smaller C, smaller gamma,
// larger epsilon.
bool better_cell(const CvResult& a, const CvResult& b);

struct GridSearchOptions {
  int folds = 5;
  std::uint64_t seed = 1;
  FoldMode fold_mode = FoldMode::day_blocked;
  unsigned workers = 1;
  svr::TrainOptions train;
};

struct GridSearchResult {
  std::size_t best_index = 0;
  svr::SvrParams best;
  std::vector<CvResult> cells;  // grid order
  double total_ms = 0.0;
};

// Every cell scored by k-fold CV with the scaler re-fit on each fold's
// training part; metrics are computed in original kW units.
GridSearchResult grid_search(const features::FeatureMatrix& matrix, const GridSpec& grid,
                             const GridSearchOptions& options = {});

}  // namespace heatcast::tuning
