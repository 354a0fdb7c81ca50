#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "heatcast/dataset.hpp"
#include "heatcast/dtw.hpp"

namespace heatcast::selector {

// Temperature comparison window anchored on a prediction or candidate day.
// It runs from 18:00 of the governing previous day (Friday for a Monday
// anchor) through the anchor day's 23:45.
struct SearchWindow {
  Date anchor{};
  data::DayType anchor_type = data::DayType::working_other;
  Date start_date{};
  int start_slot = 0;  // 18:00 = slot 73
  std::vector<double> temps;
};

inline constexpr int kWindowStartSlot = 73;  // 18:00
inline constexpr int kMondayWindowLength = 312;
inline constexpr int kDefaultWindowLength = 120;

int expected_window_length(data::DayType type);
Date window_start_date(const Date& anchor, data::DayType type);

// Query window for a prediction day: measured temperatures through the
// previous day's 23:45 plus the prediction day's 96 forecast values.
SearchWindow build_query_window(const Date& prediction_date, const data::Dataset& dataset,
                                std::span<const double> forecast_temps,
                                const data::HolidaySet& holidays = {});

// One window per historical day of the same DayType, built entirely from
// measured temperatures; days with incomplete windows are excluded.
std::vector<SearchWindow> candidate_windows(const Date& prediction_date, data::DayType type,
                                            const data::Dataset& dataset);

struct RelevantSelection {
  Date prediction_date{};
  std::vector<std::pair<Date, double>> ranked;  // ascending distance
  std::vector<Date> chosen;                     // first min(k, |candidates|)
  bool shortfall = false;                       // fewer than k candidates available
};

RelevantSelection select_relevant_days(const SearchWindow& query,
                                       const std::vector<SearchWindow>& candidates, int k,
                                       std::optional<int> band = std::nullopt);

// One sweep row per k: metrics averaged over the prediction days the runner
// could score.
struct SweepRow {
  int k = 0;
  double mean_r2 = 0.0;
  double mean_rmse = 0.0;
  int days_scored = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  int best_k = 0;  // maximizes mean R2; ties go to the smaller k
};

// Runs one prediction day at a given k and reports (r2, rmse), or nullopt if
// the day cannot be scored. The pipeline supplies the runner.
using DayRunner = std::function<std::optional<std::pair<double, double>>(const Date&, int)>;

SweepResult sweep_k(std::span<const Date> prediction_dates, int k_min, int k_max,
                    const DayRunner& runner);

}  // namespace heatcast::selector
