#include "heatcast/tuning.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "heatcast/parallel.hpp"

namespace heatcast::tuning {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<double> powers_of_two(int lo, int hi) {
  std::vector<double> values;
  values.reserve(hi - lo + 1);
  for (int e = lo; e <= hi; ++e) values.push_back(std::ldexp(1.0, e));
  return values;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Mean over finite entries; NaN if none are finite.
double finite_mean(std::span<const double> v) {
  double s = 0.0;
  std::size_t n = 0;
  for (double x : v) {
    if (std::isfinite(x)) {
      s += x;
      ++n;
    }
  }
  return n == 0 ? kNan : s / static_cast<double>(n);
}

void check_lengths(std::span<const double> a, std::span<const double> b, const char* who) {
  if (a.empty() || a.size() != b.size()) {
    raise(Errc::length_mismatch, std::string(who) + ": lengths " + std::to_string(a.size()) +
                                     " vs " + std::to_string(b.size()));
  }
}

bool effectively_constant(std::span<const double> v, double mean) {
  double spread = 0.0;
  for (double x : v) spread = std::max(spread, std::abs(x - mean));
  return spread <= 1e-12 * std::max(1.0, std::abs(mean));
}

}  // namespace

GridSpec GridSpec::relevant_preset() {
  return {powers_of_two(-5, 5), powers_of_two(-15, 15), {0.001, 0.01, 0.1, 0.2, 0.5}};
}

GridSpec GridSpec::whole_preset() {
  return {powers_of_two(-5, 15), powers_of_two(-15, 15), {0.001, 0.01, 0.1, 0.2, 0.5}};
}

GridSpec GridSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_failure, "cannot open grid file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    raise(Errc::invalid_config, path + ": " + e.what());
  }
  GridSpec grid;
  try {
    grid.c_values = doc.at("c").get<std::vector<double>>();
    grid.gamma_values = doc.at("gamma").get<std::vector<double>>();
    grid.epsilon_values = doc.at("epsilon").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::invalid_config, path + ": expected arrays `c`, `gamma`, `epsilon` (" +
                                    e.what() + ")");
  }
  if (grid.size() == 0) raise(Errc::invalid_config, path + ": grid has no cells");
  for (double c : grid.c_values) {
    if (c <= 0) raise(Errc::invalid_config, path + ": C values must be positive");
  }
  for (double g : grid.gamma_values) {
    if (g <= 0) raise(Errc::invalid_config, path + ": gamma values must be positive");
  }
  for (double e : grid.epsilon_values) {
    if (e < 0) raise(Errc::invalid_config, path + ": epsilon values must be >= 0");
  }
  return grid;
}

GridSpec GridSpec::named_or_file(const std::string& name) {
  if (name.empty() || name == "relevant") return relevant_preset();
  if (name == "whole") return whole_preset();
  return load(name);
}

svr::SvrParams GridSpec::cell(std::size_t index) const {
  const std::size_t ne = epsilon_values.size();
  const std::size_t ng = gamma_values.size();
  svr::SvrParams params;
  params.epsilon = epsilon_values[index % ne];
  params.gamma = gamma_values[(index / ne) % ng];
  params.c = c_values[index / (ne * ng)];
  return params;
}

double r2(std::span<const double> actual, std::span<const double> predicted) {
  check_lengths(actual, predicted, "r2");
  const double mean = mean_of(actual);
  if (effectively_constant(actual, mean)) {
    raise(Errc::degenerate_actual, "r2: actual series has zero variance");
  }
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double r = actual[i] - predicted[i];
    const double d = actual[i] - mean;
    ss_res += r * r;
    ss_tot += d * d;
  }
  return 1.0 - ss_res / ss_tot;
}

double rmse(std::span<const double> actual, std::span<const double> predicted) {
  check_lengths(actual, predicted, "rmse");
  double ss = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double r = actual[i] - predicted[i];
    ss += r * r;
  }
  return std::sqrt(ss / static_cast<double>(actual.size()));
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y, "pearson_r");
  if (x.size() < 2) raise(Errc::length_mismatch, "pearson_r: need at least 2 samples");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  if (effectively_constant(x, mx) || effectively_constant(y, my)) {
    raise(Errc::degenerate_series, "pearson_r: constant input series");
  }
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k, std::uint64_t seed,
                                                  std::size_t block) {
  if (k < 2) raise(Errc::invalid_config, "kfold_split: k must be >= 2");
  if (block == 0 || n % block != 0) {
    raise(Errc::invalid_config, "kfold_split: n must be a multiple of the block size");
  }
  const std::size_t n_blocks = n / block;
  if (n_blocks < static_cast<std::size_t>(k)) {
    raise(Errc::too_few_samples, "kfold_split: " + std::to_string(n_blocks) +
                                     " blocks cannot fill " + std::to_string(k) + " folds");
  }

  std::vector<std::size_t> order(n_blocks);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < n_blocks; ++i) {
    const std::size_t b = order[i];
    auto& fold = folds[i % k];
    for (std::size_t j = 0; j < block; ++j) fold.push_back(b * block + j);
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

bool better_cell(const CvResult& a, const CvResult& b) {
  auto key_r2 = [](const CvResult& r) { return std::isfinite(r.mean_r2) ? r.mean_r2 : -1e300; };
  if (a.mean_rmse != b.mean_rmse) return a.mean_rmse < b.mean_rmse;
  if (key_r2(a) != key_r2(b)) return key_r2(a) > key_r2(b);
  if (a.params.c != b.params.c) return a.params.c < b.params.c;
  if (a.params.gamma != b.params.gamma) return a.params.gamma < b.params.gamma;
  return a.params.epsilon > b.params.epsilon;
}

GridSearchResult grid_search(const features::FeatureMatrix& matrix, const GridSpec& grid,
                             const GridSearchOptions& options) {
  if (!matrix.has_targets()) raise(Errc::invalid_config, "grid_search: matrix has no targets");
  if (matrix.scaled()) {
    raise(Errc::invalid_config, "grid_search: pass the unscaled matrix; scalers are re-fit per fold");
  }
  if (grid.size() == 0) raise(Errc::invalid_config, "grid_search: empty grid");
  const std::size_t n = matrix.rows();
  if (n < static_cast<std::size_t>(options.folds)) {
    raise(Errc::too_few_samples, "grid_search: fewer rows than folds");
  }

  const auto start_time = std::chrono::steady_clock::now();

  const std::size_t block =
      options.fold_mode == FoldMode::day_blocked && matrix.day_aligned() ? kSlotsPerDay : 1;
  const auto folds = kfold_split(n, options.folds, options.seed, block);

  // Per-fold training/validation data is shared read-only by every cell.
  // The pairwise distance matrix lets each cell exponentiate its own Gram
  // instead of redoing the O(n^2 m) distance work.
  struct FoldData {
    features::FeatureMatrix train_scaled;
    features::FeatureMatrix val_scaled;
    std::vector<double> val_actual;  // kW
    std::shared_ptr<const std::vector<double>> sqdist;
  };
  std::vector<FoldData> fold_data(folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::size_t> train_idx;
    train_idx.reserve(n - folds[f].size());
    std::vector<bool> held(n, false);
    for (std::size_t idx : folds[f]) held[idx] = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!held[i]) train_idx.push_back(i);
    }
    const auto train = matrix.select_rows(train_idx);
    const auto val = matrix.select_rows(folds[f]);
    const auto scaler = data::Scaler::fit(train);
    fold_data[f].train_scaled = scaler.apply(train);
    fold_data[f].val_scaled = scaler.apply(val);
    fold_data[f].val_actual = val.targets();
    if (train.rows() <= options.train.dense_gram_limit) {
      fold_data[f].sqdist = svr::pairwise_squared_distances(fold_data[f].train_scaled);
    }
  }

  const std::size_t n_cells = grid.size();
  GridSearchResult result;
  result.cells.resize(n_cells);
  for (std::size_t ci = 0; ci < n_cells; ++ci) {
    result.cells[ci].params = grid.cell(ci);
    result.cells[ci].fold_r2.assign(folds.size(), kNan);
    result.cells[ci].fold_rmse.assign(folds.size(), kNan);
  }

  struct TaskTime {
    double ms = 0.0;
  };
  std::vector<TaskTime> task_ms(n_cells * folds.size());

  run_parallel(n_cells * folds.size(), options.workers, [&](std::size_t task) {
    const std::size_t ci = task / folds.size();
    const std::size_t f = task % folds.size();
    const FoldData& fd = fold_data[f];
    CvResult& cell = result.cells[ci];

    const auto t0 = std::chrono::steady_clock::now();
    svr::TrainOptions train_opts = options.train;
    train_opts.pairwise_sqdist = fd.sqdist;
    const auto model = svr::train_svr(fd.train_scaled, cell.params, train_opts);
    if (model.convergence.iteration_cap_hit) cell.iteration_cap_hit = true;
    const auto predicted = svr::predict(model, fd.val_scaled);
    const auto t1 = std::chrono::steady_clock::now();
    task_ms[task].ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    cell.fold_rmse[f] = rmse(fd.val_actual, predicted);
    try {
      cell.fold_r2[f] = r2(fd.val_actual, predicted);
    } catch (const Error& e) {
      if (e.code() != Errc::degenerate_actual) throw;
      cell.fold_r2[f] = kNan;  // fold actuals constant; R2 undefined for it
    }
  });

  for (std::size_t ci = 0; ci < n_cells; ++ci) {
    CvResult& cell = result.cells[ci];
    cell.mean_rmse = mean_of(cell.fold_rmse);
    cell.mean_r2 = finite_mean(cell.fold_r2);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      cell.train_ms += task_ms[ci * folds.size() + f].ms;
    }
  }

  result.best_index = 0;
  for (std::size_t ci = 1; ci < n_cells; ++ci) {
    if (better_cell(result.cells[ci], result.cells[result.best_index])) result.best_index = ci;
  }
  result.best = result.cells[result.best_index].params;

  const auto end_time = std::chrono::steady_clock::now();
  result.total_ms = std::chrono::duration<double, std::milli>(end_time - start_time).count();
  return result;
}

}  // namespace heatcast::tuning
