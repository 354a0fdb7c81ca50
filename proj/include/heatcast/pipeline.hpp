#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "heatcast/dataset.hpp"
#include "heatcast/features.hpp"
#include "heatcast/selector.hpp"
#include "heatcast/tuning.hpp"

namespace heatcast::pipeline {

enum class Mode { relevant, whole };

std::string_view to_string(Mode mode);

struct RunConfig {
  std::string data_path;
  std::string profiles_path;
  std::string forecast_dir;   // empty = use measured temperatures as the forecast
  std::string holidays_path;  // optional
  Mode mode = Mode::relevant;
  int k = 12;
  std::string grid;  // "relevant" | "whole" | override file; empty = preset for the mode
  Date test_start{};
  Date test_end{};
  std::uint64_t seed = 1;
  std::string out_dir;
  unsigned workers = 0;  // 0 = hardware concurrency
  tuning::FoldMode fold_mode = tuning::FoldMode::day_blocked;
  int cv_folds = 5;
  svr::TrainOptions train;
  data::Bounds bounds;
};

struct SelectedDay {
  Date date{};
  double distance = 0.0;
};

struct DayOutcome {
  Date date{};
  data::DayType type = data::DayType::working_other;
  data::CoarseClass coarse = data::CoarseClass::working;
  bool skipped = false;
  std::string skip_reason;
  svr::SvrParams params;
  std::vector<SelectedDay> selected;  // relevant mode only
  bool selection_shortfall = false;
  std::array<double, kSlotsPerDay> y_pred{};
  std::array<double, kSlotsPerDay> y_true{};  // NaN when truth is absent
  bool scored = false;
  double r2 = 0.0;
  double rmse = 0.0;
  double train_ms = 0.0;  // grid search + final training; class-level in whole mode
  bool iteration_cap_hit = false;
};

struct ClassAggregate {
  int days_scored = 0;
  double mean_r2 = 0.0;
  double mean_rmse = 0.0;
  double pooled_r2 = 0.0;  // over all scored samples of the class
  double pooled_rmse = 0.0;
  double train_ms = 0.0;
};

struct WholeModelInfo {
  svr::SvrParams params;
  std::size_t rows = 0;
  double train_ms = 0.0;
  bool iteration_cap_hit = false;
};

struct PredictionReport {
  Mode mode = Mode::relevant;
  RunConfig config;
  std::vector<DayOutcome> days;  // date order
  ClassAggregate working;
  ClassAggregate weekend;
  ClassAggregate overall;
  double total_train_ms = 0.0;
  std::optional<WholeModelInfo> whole_working;
  std::optional<WholeModelInfo> whole_weekend;
};

// Reads <dir>/<date>.csv, header `timestamp,t_out_c`, exactly 96 rows.
std::vector<double> read_forecast(const std::string& forecast_dir, const Date& date);

PredictionReport run_relevant(const RunConfig& config);
PredictionReport run_whole(const RunConfig& config);
PredictionReport run(const RunConfig& config);

// Writes predictions.csv, daily_metrics.csv, metrics.json (all deterministic
// for a fixed config and seed), plus timing.json and summary.txt which carry
// wall-clock measurements.
void emit_report(const PredictionReport& report, const std::string& out_dir);

std::string compare_summary(const PredictionReport& relevant, const PredictionReport& whole);

// Variant over previously emitted run directories (reads metrics/timing files).
std::string compare_summary_from_dirs(const std::string& relevant_dir,
                                      const std::string& whole_dir);

// Fig. 5-style curve: reruns the relevant pipeline for each k, emitting one
// per-k report directory under out_dir plus sweep_k.csv.
selector::SweepResult sweep_k(const RunConfig& config, int k_min, int k_max);

}  // namespace heatcast::pipeline
