#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "heatcast/dataset.hpp"

namespace heatcast::features {

// Order of the 9 pseudo-dynamic inputs per sample slot:
// sin, cos, t_out, g(l), tau(l), g(l-1), g(l-2), g(l-3), g(l-4).
inline constexpr std::size_t kFeatureCount = 9;
inline constexpr int kProfileLags = 4;

struct RowOrigin {
  Date date{};
  int slot = 0;
  auto operator<=>(const RowOrigin&) const = default;
};

class FeatureMatrix {
public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(std::size_t cols) : cols_(cols) {}

  std::size_t rows() const { return cols_ == 0 ? 0 : values_.size() / cols_; }
  std::size_t cols() const { return cols_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }

  void push_row(std::span<const double> values, std::optional<double> target,
                RowOrigin origin = {});

  bool has_targets() const { return !targets_.empty(); }
  const std::vector<double>& targets() const { return targets_; }
  std::vector<double>& targets() { return targets_; }

  const std::vector<RowOrigin>& origins() const { return origins_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  // True when rows form whole per-date blocks of 96 slots, the layout the
  // day-blocked cross-validation split relies on.
  bool day_aligned() const;

  bool scaled() const { return scaler_.has_value(); }
  const std::optional<data::Scaler>& scaler() const { return scaler_; }
  void set_scaler(data::Scaler scaler) { scaler_ = std::move(scaler); }
  void clear_scaler() { scaler_.reset(); }

  FeatureMatrix select_rows(std::span<const std::size_t> indices) const;

private:
  std::size_t cols_ = 0;
  std::vector<double> values_;  // row-major
  std::vector<double> targets_;
  std::vector<RowOrigin> origins_;
  std::optional<data::Scaler> scaler_;
};

// Scheduled operation level g(l) in [0,1] per day type, 96 slots each.
// Holiday days fall back to the saturday profile unless the config carries an
// explicit holidays profile.
struct ProfileConfig {
  std::array<std::array<double, kSlotsPerDay>, 4> by_type{};
  std::array<double, kSlotsPerDay> holidays{};
  bool has_holiday_profile = false;

  static ProfileConfig load(const std::string& path);
  static ProfileConfig flat(double level);

  std::span<const double, kSlotsPerDay> profile(data::DayType type, bool is_holiday = false) const;
  void validate() const;
};

// (sin(2*pi*l/L), cos(2*pi*l/L)) for slot l in 1..L.
std::pair<double, double> temporal_indicators(int l, int L = kSlotsPerDay);

// g(l) with slots <= 0 wrapping into the tail of the previous day's profile.
double profile_at(std::span<const double, kSlotsPerDay> today,
                  std::span<const double, kSlotsPerDay> prev, int l);

// tau(l) = g(l) - g(l-1), the one-step schedule transition.
double transition_indicator(std::span<const double, kSlotsPerDay> today,
                            std::span<const double, kSlotsPerDay> prev, int l);

// 96 feature rows for one day. `temps` supplies t_out per slot (measured or
// forecast); `targets`, when non-empty, must hold 96 aligned loads.
FeatureMatrix build_day_features(const Date& date, data::DayType type,
                                 std::span<const double> temps, const ProfileConfig& profiles,
                                 data::DayType prev_type, bool is_holiday = false,
                                 bool prev_is_holiday = false,
                                 std::span<const double> targets = {});

FeatureMatrix build_day_features(const data::DayRecord& day, const ProfileConfig& profiles,
                                 const data::HolidaySet& holidays = {});

// Stacks the selected training days, 96 rows each, targets aligned, unscaled.
FeatureMatrix assemble_training_matrix(const data::Dataset& dataset, std::span<const Date> days,
                                       const ProfileConfig& profiles,
                                       const data::HolidaySet& holidays = {});

}  // namespace heatcast::features
