#include "heatcast/selector.hpp"

#include <algorithm>
#include <cmath>

namespace heatcast::selector {
namespace {

// Appends day temperatures for slots [from, to] (1-based, inclusive).
// Returns false if the day is absent or any needed slot is missing.
bool append_measured(const data::Dataset& dataset, const Date& date, int from, int to,
                     std::vector<double>& out) {
  const data::DayRecord* day = dataset.find(date);
  if (day == nullptr) return false;
  for (int slot = from; slot <= to; ++slot) {
    const double t = day->t_out[slot - 1];
    if (std::isnan(t)) return false;
    out.push_back(t);
  }
  return true;
}

// Window body shared by query and candidate construction: everything from
// the start (previous day 18:00) through the day before the anchor.
bool build_history_part(const Date& anchor, data::DayType type, const data::Dataset& dataset,
                        std::vector<double>& out) {
  const Date start = window_start_date(anchor, type);
  if (!append_measured(dataset, start, kWindowStartSlot, kSlotsPerDay, out)) return false;
  for (Date d = add_days(start, 1); d < anchor; d = add_days(d, 1)) {
    if (!append_measured(dataset, d, 1, kSlotsPerDay, out)) return false;
  }
  return true;
}

}  // namespace

int expected_window_length(data::DayType type) {
  return type == data::DayType::working_monday ? kMondayWindowLength : kDefaultWindowLength;
}

Date window_start_date(const Date& anchor, data::DayType type) {
  // Monday anchors reach back to Friday 18:00; every other day type starts
  // at 18:00 of the immediately preceding day.
  return add_days(anchor, type == data::DayType::working_monday ? -3 : -1);
}

SearchWindow build_query_window(const Date& prediction_date, const data::Dataset& dataset,
                                std::span<const double> forecast_temps,
                                const data::HolidaySet& holidays) {
  if (forecast_temps.size() != kSlotsPerDay) {
    raise(Errc::missing_forecast, prediction_date.to_string() + ": forecast must supply " +
                                      std::to_string(kSlotsPerDay) + " temperatures, got " +
                                      std::to_string(forecast_temps.size()));
  }
  for (double t : forecast_temps) {
    if (std::isnan(t)) {
      raise(Errc::missing_forecast, prediction_date.to_string() + ": forecast has missing values");
    }
  }

  SearchWindow window;
  window.anchor = prediction_date;
  window.anchor_type = data::classify_day(prediction_date, holidays);
  window.start_date = window_start_date(prediction_date, window.anchor_type);
  window.start_slot = kWindowStartSlot;
  window.temps.reserve(expected_window_length(window.anchor_type));

  if (!build_history_part(prediction_date, window.anchor_type, dataset, window.temps)) {
    raise(Errc::missing_history,
          prediction_date.to_string() + ": measured temperatures missing between " +
              window.start_date.to_string() + " 18:00 and the day before prediction");
  }
  window.temps.insert(window.temps.end(), forecast_temps.begin(), forecast_temps.end());
  return window;
}

std::vector<SearchWindow> candidate_windows(const Date& prediction_date, data::DayType type,
                                            const data::Dataset& dataset) {
  std::vector<SearchWindow> windows;
  for (const data::DayRecord& day : dataset.days) {
    if (day.date >= prediction_date) break;  // days are date-ordered
    if (day.type != type || !day.complete) continue;

    SearchWindow window;
    window.anchor = day.date;
    window.anchor_type = type;
    window.start_date = window_start_date(day.date, type);
    window.start_slot = kWindowStartSlot;
    window.temps.reserve(expected_window_length(type));
    if (!build_history_part(day.date, type, dataset, window.temps)) continue;
    if (!append_measured(dataset, day.date, 1, kSlotsPerDay, window.temps)) continue;
    windows.push_back(std::move(window));
  }
  if (windows.empty()) {
    raise(Errc::empty_pool, prediction_date.to_string() + ": no complete " +
                                std::string(data::to_string(type)) + " candidates before it");
  }
  return windows;
}

RelevantSelection select_relevant_days(const SearchWindow& query,
                                       const std::vector<SearchWindow>& candidates, int k,
                                       std::optional<int> band) {
  if (k < 1) raise(Errc::invalid_config, "select_relevant_days: k must be >= 1");
  if (candidates.empty()) {
    raise(Errc::empty_pool, query.anchor.to_string() + ": empty candidate pool");
  }

  std::vector<std::pair<Date, std::vector<double>>> pool;
  pool.reserve(candidates.size());
  for (const SearchWindow& w : candidates) pool.emplace_back(w.anchor, w.temps);

  const auto ranked = dtw::rank_candidates<Date>(query.temps, pool, band);

  RelevantSelection selection;
  selection.prediction_date = query.anchor;
  selection.ranked.reserve(ranked.size());
  for (const auto& r : ranked) selection.ranked.emplace_back(r.id, r.distance);
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), ranked.size());
  for (std::size_t i = 0; i < take; ++i) selection.chosen.push_back(ranked[i].id);
  selection.shortfall = take < static_cast<std::size_t>(k);
  return selection;
}

SweepResult sweep_k(std::span<const Date> prediction_dates, int k_min, int k_max,
                    const DayRunner& runner) {
  if (k_min < 1 || k_max < k_min) raise(Errc::invalid_config, "sweep_k: bad k range");

  SweepResult result;
  for (int k = k_min; k <= k_max; ++k) {
    SweepRow row;
    row.k = k;
    double sum_r2 = 0.0, sum_rmse = 0.0;
    for (const Date& date : prediction_dates) {
      if (auto scored = runner(date, k)) {
        sum_r2 += scored->first;
        sum_rmse += scored->second;
        ++row.days_scored;
      }
    }
    if (row.days_scored > 0) {
      row.mean_r2 = sum_r2 / row.days_scored;
      row.mean_rmse = sum_rmse / row.days_scored;
    }
    result.rows.push_back(row);
  }

  result.best_k = result.rows.front().k;
  double best_r2 = result.rows.front().mean_r2;
  for (const SweepRow& row : result.rows) {
    if (row.days_scored > 0 && row.mean_r2 > best_r2) {
      best_r2 = row.mean_r2;
      result.best_k = row.k;
    }
  }
  return result;
}

}  // namespace heatcast::selector
