#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "heatcast/common.hpp"
#include "heatcast/time.hpp"

namespace heatcast::features {
class FeatureMatrix;
}

namespace heatcast::data {

enum class DayType { working_monday, working_other, saturday, sunday };
enum class CoarseClass { working, weekend };

CoarseClass coarse_class(DayType type);
std::string_view to_string(DayType type);
std::string_view to_string(CoarseClass cls);
std::optional<DayType> parse_day_type(std::string_view name);

using HolidaySet = std::set<Date>;

// One ISO date per line; blank lines and lines starting with '#' are skipped.
HolidaySet load_holidays(const std::string& path);

// Monday -> working_monday, Tue-Fri -> working_other, Sat/Sun -> their own
// types. Holidays are handled like Saturdays (coarse class weekend).
DayType classify_day(const Date& date, const HolidaySet& holidays = {});

struct Bounds {
  double t_out_min = -30.0;
  double t_out_max = 50.0;
  double load_min = 0.0;
  double load_max = 10000.0;
  int load_gap_limit = 2;  // longer load gaps exclude the day from the training pool
  int temp_gap_limit = 4;  // longer temperature gaps drop the day entirely
};

struct Sample {
  Timestamp ts;
  std::optional<double> t_out;  // degC
  std::optional<double> load;   // kW, absent for future timestamps
};

struct DayRecord {
  Date date{};
  DayType type = DayType::working_other;
  std::array<double, kSlotsPerDay> t_out{};  // NaN = missing
  std::array<double, kSlotsPerDay> load{};   // NaN = missing
  bool complete = false;                     // all 96 loads present after cleaning

  bool temps_complete() const;
  bool loads_complete() const;
  Sample sample(int slot) const;
};

struct CleanEvent {
  enum class Kind { out_of_bounds, interpolated, edge_filled, day_dropped, day_incomplete, row_ignored };
  Kind kind{};
  Date date{};
  int slot = 0;  // 0 when the event covers the whole day
  std::string detail;
};

std::string_view to_string(CleanEvent::Kind kind);

struct Dataset {
  std::vector<DayRecord> days;  // strictly increasing dates, no duplicates
  std::string source;
  std::vector<CleanEvent> log;

  const DayRecord* find(const Date& date) const;
  bool empty() const { return days.empty(); }
};

// CSV contract: header exactly `timestamp,t_out_c,load_kw`, ISO-8601 local
// timestamps at 15-minute resolution, empty field = missing value.
Dataset ingest_csv(const std::string& path, const Bounds& bounds = {},
                   const HolidaySet& holidays = {});

// Cleaning rules: values outside bounds become missing; gaps up to the
// per-signal limit are linearly interpolated (day-edge gaps copy the nearest
// value); longer temperature gaps drop the day, longer load gaps keep it with
// complete=false.
Dataset clean_and_segment(std::vector<Sample> samples, const Bounds& bounds = {},
                          const HolidaySet& holidays = {}, std::string source = {});

void write_csv(const Dataset& dataset, const std::string& path);

// Column-wise standardization to mean 0 / std 1 with the population (divide
// by n) convention. Constant columns are centered only (std stored as 1) and
// flagged rather than rejected. The target column is standardized the same
// way and inverse-transformed at prediction time.
class Scaler {
public:
  static Scaler fit(const features::FeatureMatrix& matrix);

  features::FeatureMatrix apply(const features::FeatureMatrix& matrix) const;
  features::FeatureMatrix invert(const features::FeatureMatrix& matrix) const;

  double scale_target(double y) const { return (y - target_mean_) / target_std_; }
  double unscale_target(double y) const { return y * target_std_ + target_mean_; }

  std::size_t cols() const { return mean_.size(); }
  double feature_mean(std::size_t j) const { return mean_[j]; }
  double feature_std(std::size_t j) const { return std_[j]; }
  double target_mean() const { return target_mean_; }
  double target_std() const { return target_std_; }
  bool has_target_stats() const { return has_target_stats_; }
  const std::vector<std::size_t>& degenerate_columns() const { return degenerate_; }

  bool operator==(const Scaler&) const = default;

  static Scaler from_stats(std::vector<double> means, std::vector<double> stds,
                           double target_mean, double target_std, bool has_target_stats,
                           std::vector<std::size_t> degenerate);

private:
  std::vector<double> mean_;
  std::vector<double> std_;
  double target_mean_ = 0.0;
  double target_std_ = 1.0;
  bool has_target_stats_ = false;
  std::vector<std::size_t> degenerate_;
};

Scaler fit_scaler(const features::FeatureMatrix& matrix);
features::FeatureMatrix apply_scaler(const Scaler& scaler, const features::FeatureMatrix& matrix);
features::FeatureMatrix invert_scaler(const Scaler& scaler, const features::FeatureMatrix& matrix);

}  // namespace heatcast::data
