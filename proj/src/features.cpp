#include "heatcast/features.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

namespace heatcast::features {

void FeatureMatrix::push_row(std::span<const double> values, std::optional<double> target,
                             RowOrigin origin) {
  if (cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    raise(Errc::dimension_mismatch, "push_row: expected " + std::to_string(cols_) +
                                        " values, got " + std::to_string(values.size()));
  }
  if (has_targets() != target.has_value() && rows() > 0) {
    raise(Errc::dimension_mismatch, "push_row: rows must uniformly have or lack targets");
  }
  values_.insert(values_.end(), values.begin(), values.end());
  if (target) targets_.push_back(*target);
  origins_.push_back(origin);
}

bool FeatureMatrix::day_aligned() const {
  const std::size_t n = rows();
  if (n == 0 || n % kSlotsPerDay != 0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const RowOrigin& o = origins_[i];
    if (o.slot != static_cast<int>(i % kSlotsPerDay) + 1) return false;
    if (i % kSlotsPerDay != 0 && o.date != origins_[i - 1].date) return false;
  }
  return true;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
  FeatureMatrix out(cols_);
  for (std::size_t idx : indices) {
    std::optional<double> target;
    if (has_targets()) target = targets_[idx];
    out.push_row(row(idx), target, origins_[idx]);
  }
  if (scaler_) out.set_scaler(*scaler_);
  return out;
}

namespace {

constexpr const char* kProfileKeys[4] = {"working_monday", "working_other", "saturday", "sunday"};

std::array<double, kSlotsPerDay> parse_profile_array(const nlohmann::json& arr,
                                                     const std::string& key,
                                                     const std::string& path) {
  if (!arr.is_array() || arr.size() != kSlotsPerDay) {
    raise(Errc::invalid_config, path + ": key `" + key + "` must be an array of " +
                                    std::to_string(kSlotsPerDay) + " numbers");
  }
  std::array<double, kSlotsPerDay> values{};
  for (std::size_t i = 0; i < kSlotsPerDay; ++i) {
    if (!arr[i].is_number()) {
      raise(Errc::invalid_config,
            path + ": `" + key + "[" + std::to_string(i) + "]` is not a number");
    }
    const double v = arr[i].get<double>();
    if (v < 0.0 || v > 1.0) {
      raise(Errc::invalid_config, path + ": `" + key + "[" + std::to_string(i) + "]` = " +
                                      format_double(v) + " is outside [0,1]");
    }
    values[i] = v;
  }
  return values;
}

}  // namespace

ProfileConfig ProfileConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_failure, "cannot open profile config " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    raise(Errc::invalid_config, path + ": " + e.what());
  }
  if (!doc.is_object()) raise(Errc::invalid_config, path + ": top level must be an object");

  ProfileConfig config;
  for (int t = 0; t < 4; ++t) {
    const std::string key = kProfileKeys[t];
    if (!doc.contains(key)) raise(Errc::invalid_config, path + ": missing key `" + key + "`");
    config.by_type[t] = parse_profile_array(doc[key], key, path);
  }
  if (doc.contains("holidays_profile")) {
    config.holidays = parse_profile_array(doc["holidays_profile"], "holidays_profile", path);
    config.has_holiday_profile = true;
  } else {
    config.holidays = config.by_type[static_cast<int>(data::DayType::saturday)];
  }
  return config;
}

ProfileConfig ProfileConfig::flat(double level) {
  ProfileConfig config;
  for (auto& profile : config.by_type) profile.fill(level);
  config.holidays.fill(level);
  return config;
}

std::span<const double, kSlotsPerDay> ProfileConfig::profile(data::DayType type,
                                                             bool is_holiday) const {
  if (is_holiday && has_holiday_profile) return std::span<const double, kSlotsPerDay>(holidays);
  return std::span<const double, kSlotsPerDay>(by_type[static_cast<int>(type)]);
}

void ProfileConfig::validate() const {
  for (int t = 0; t < 4; ++t) {
    for (double v : by_type[t]) {
      if (v < 0.0 || v > 1.0 || std::isnan(v)) {
        raise(Errc::invalid_config,
              std::string("profile `") + kProfileKeys[t] + "` has a value outside [0,1]");
      }
    }
  }
}

std::pair<double, double> temporal_indicators(int l, int L) {
  if (l < 1 || l > L) {
    raise(Errc::slot_out_of_range,
          "slot " + std::to_string(l) + " outside 1.." + std::to_string(L));
  }
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(l) / static_cast<double>(L);
  return {std::sin(angle), std::cos(angle)};
}

double profile_at(std::span<const double, kSlotsPerDay> today,
                  std::span<const double, kSlotsPerDay> prev, int l) {
  if (l >= 1) return today[l - 1];
  return prev[kSlotsPerDay + l - 1];  // l = 0 reads the previous day's slot 96
}

double transition_indicator(std::span<const double, kSlotsPerDay> today,
                            std::span<const double, kSlotsPerDay> prev, int l) {
  return profile_at(today, prev, l) - profile_at(today, prev, l - 1);
}

FeatureMatrix build_day_features(const Date& date, data::DayType type,
                                 std::span<const double> temps, const ProfileConfig& profiles,
                                 data::DayType prev_type, bool is_holiday, bool prev_is_holiday,
                                 std::span<const double> targets) {
  if (temps.size() != kSlotsPerDay) {
    raise(Errc::missing_temperature, date.to_string() + ": expected " +
                                         std::to_string(kSlotsPerDay) + " temperatures, got " +
                                         std::to_string(temps.size()));
  }
  for (double t : temps) {
    if (std::isnan(t)) {
      raise(Errc::missing_temperature, date.to_string() + " has missing temperature samples");
    }
  }
  if (!targets.empty() && targets.size() != kSlotsPerDay) {
    raise(Errc::incomplete_day, date.to_string() + ": targets must cover all 96 slots");
  }

  const auto today = profiles.profile(type, is_holiday);
  const auto prev = profiles.profile(prev_type, prev_is_holiday);

  FeatureMatrix matrix(kFeatureCount);
  for (int l = 1; l <= kSlotsPerDay; ++l) {
    const auto [sin_t, cos_t] = temporal_indicators(l);
    std::array<double, kFeatureCount> row = {
        sin_t,
        cos_t,
        temps[l - 1],
        profile_at(today, prev, l),
        transition_indicator(today, prev, l),
        profile_at(today, prev, l - 1),
        profile_at(today, prev, l - 2),
        profile_at(today, prev, l - 3),
        profile_at(today, prev, l - 4),
    };
    std::optional<double> target;
    if (!targets.empty()) target = targets[l - 1];
    matrix.push_row(row, target, RowOrigin{date, l});
  }
  return matrix;
}

FeatureMatrix build_day_features(const data::DayRecord& day, const ProfileConfig& profiles,
                                 const data::HolidaySet& holidays) {
  if (!day.temps_complete()) {
    raise(Errc::missing_temperature, day.date.to_string() + " has missing temperature samples");
  }
  const Date prev_date = add_days(day.date, -1);
  const data::DayType prev_type = data::classify_day(prev_date, holidays);
  std::span<const double> targets;
  if (day.complete) targets = std::span<const double>(day.load.data(), kSlotsPerDay);
  return build_day_features(day.date, day.type, std::span<const double>(day.t_out.data(), 96),
                            profiles, prev_type, holidays.contains(day.date),
                            holidays.contains(prev_date), targets);
}

FeatureMatrix assemble_training_matrix(const data::Dataset& dataset, std::span<const Date> days,
                                       const ProfileConfig& profiles,
                                       const data::HolidaySet& holidays) {
  if (days.empty()) raise(Errc::empty_selection, "assemble_training_matrix: no days selected");

  FeatureMatrix matrix(kFeatureCount);
  for (const Date& date : days) {
    const data::DayRecord* day = dataset.find(date);
    if (day == nullptr || !day->complete) {
      raise(Errc::incomplete_day, date.to_string() + " is not a complete training day");
    }
    const FeatureMatrix block = build_day_features(*day, profiles, holidays);
    for (std::size_t i = 0; i < block.rows(); ++i) {
      matrix.push_row(block.row(i), block.targets()[i], block.origins()[i]);
    }
  }
  return matrix;
}

}  // namespace heatcast::features
