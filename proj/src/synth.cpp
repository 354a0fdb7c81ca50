#include "heatcast/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "heatcast/common.hpp"
#include "heatcast/dataset.hpp"

namespace heatcast::synth {
namespace {

namespace fs = std::filesystem;

// Weekday operation level by minute of day: early ramp-up so the plant can
// recover the overnight setback, a lunch dip, ramp-down into the evening.
double working_profile(int minute) {
  if (minute < 330) return 0.0;                                    // before 05:30
  if (minute < 480) return (minute - 330) / 150.0;                 // 05:30-08:00 ramp
  if (minute < 720) return 1.0;                                    // 08:00-12:00
  if (minute < 780) return 0.7;                                    // lunch
  if (minute < 1020) return 1.0;                                   // 13:00-17:00
  if (minute < 1140) return 1.0 - (minute - 1020) / 120.0;         // 17:00-19:00 ramp
  return 0.0;
}

std::array<double, kSlotsPerDay> profile_values(bool working) {
  std::array<double, kSlotsPerDay> values{};
  for (int slot = 1; slot <= kSlotsPerDay; ++slot) {
    values[slot - 1] = working ? working_profile(slot_minute(slot)) : 0.0;
  }
  return values;
}

void write_profile_array(std::ofstream& out, const char* key,
                         const std::array<double, kSlotsPerDay>& values, bool last) {
  out << "  \"" << key << "\": [";
  for (int i = 0; i < kSlotsPerDay; ++i) {
    if (i > 0) out << ", ";
    out << format_double(values[i]);
  }
  out << "]" << (last ? "" : ",") << "\n";
}

void validate(const Scenario& s, int days) {
  if (days < 30) raise(Errc::invalid_scenario, "need at least 30 days, got " + std::to_string(days));
  if (weekday(s.start) != 0) raise(Errc::invalid_scenario, "start date must be a Monday");
  if (s.heat_loss_kw_per_k <= 0 || s.thermal_capacity_kwh_per_k <= 0 ||
      s.control_gain_kw_per_k <= 0 || s.peak_power_kw <= 0) {
    raise(Errc::invalid_scenario, "building parameters must be positive");
  }
  if (s.t_comfort_c <= s.t_setback_c) {
    raise(Errc::invalid_scenario, "comfort set-point must exceed the setback");
  }
  if (s.noise_phi < 0 || s.noise_phi >= 1) {
    raise(Errc::invalid_scenario, "noise_phi must lie in [0,1)");
  }
}

}  // namespace

SynthPaths generate_synthetic(const std::string& out_dir, int days, std::uint64_t seed,
                              const Scenario& scenario) {
  validate(scenario, days);

  fs::create_directories(out_dir);
  SynthPaths paths;
  paths.data_csv = (fs::path(out_dir) / "data.csv").string();
  paths.profiles_json = (fs::path(out_dir) / "profiles.json").string();
  paths.forecast_dir = (fs::path(out_dir) / "forecasts").string();
  paths.holidays_txt = (fs::path(out_dir) / "holidays.txt").string();
  fs::create_directories(paths.forecast_dir);

  const auto working = profile_values(true);
  const auto weekend = profile_values(false);
  {
    std::ofstream out(paths.profiles_json);
    if (!out) raise(Errc::io_failure, "cannot write " + paths.profiles_json);
    out << "{\n";
    write_profile_array(out, "working_monday", working, false);
    write_profile_array(out, "working_other", working, false);
    write_profile_array(out, "saturday", weekend, false);
    write_profile_array(out, "sunday", weekend, true);
    out << "}\n";
  }
  {
    std::ofstream out(paths.holidays_txt);
    if (!out) raise(Errc::io_failure, "cannot write " + paths.holidays_txt);
    out << "# no holidays in the synthetic corpus\n";
  }

  Rng weather_rng(seed);
  Rng load_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  Rng forecast_rng(seed ^ 0xc2b2ae3d27d4eb4fULL);

  const double dt_h = kSlotMinutes / 60.0;
  const double two_pi = 2.0 * std::numbers::pi;
  double ar_noise = 0.0;
  double t_int = scenario.t_setback_c + 4.0;

  std::ofstream data(paths.data_csv);
  if (!data) raise(Errc::io_failure, "cannot write " + paths.data_csv);
  data << "timestamp,t_out_c,load_kw\n";

  for (int d = 0; d < days; ++d) {
    const Date date = add_days(scenario.start, d);
    const bool is_working = weekday(date) < 5;
    const auto& profile = is_working ? working : weekend;

    std::ofstream forecast((fs::path(paths.forecast_dir) / (date.to_string() + ".csv")).string());
    if (!forecast) raise(Errc::io_failure, "cannot write forecast for " + date.to_string());
    forecast << "timestamp,t_out_c\n";

    for (int slot = 1; slot <= kSlotsPerDay; ++slot) {
      const double day_frac = d + (slot - 1) / 96.0;
      const double hour = slot_minute(slot) / 60.0;
      const double seasonal =
          -scenario.seasonal_amplitude_c *
          std::cos(two_pi * (day_frac - scenario.cold_center_day) / 365.0);
      const double diurnal =
          scenario.diurnal_amplitude_c * std::cos(two_pi * (hour - 14.0) / 24.0);
      ar_noise = scenario.noise_phi * ar_noise +
                 scenario.noise_sigma_c * std::sqrt(1.0 - scenario.noise_phi * scenario.noise_phi) *
                     weather_rng.normal();
      double t_out = scenario.t_mean_c + seasonal + diurnal + ar_noise;
      t_out = std::clamp(t_out, scenario.t_floor_c, scenario.t_ceiling_c);

      const double g = profile[slot - 1];
      const double t_set =
          scenario.t_setback_c + g * (scenario.t_comfort_c - scenario.t_setback_c);
      const double power = std::clamp(scenario.control_gain_kw_per_k * (t_set - t_int), 0.0,
                                      scenario.peak_power_kw);
      const double load =
          std::max(0.0, power + scenario.measurement_noise_kw * load_rng.normal());

      t_int += dt_h *
               (scenario.heat_loss_kw_per_k * (t_out - t_int) + power) /
               scenario.thermal_capacity_kwh_per_k;

      data << format_timestamp(date, slot) << ',' << format_double(t_out) << ','
           << format_double(load) << '\n';

      double t_forecast = t_out;
      if (scenario.forecast_noise_sigma_c > 0) {
        t_forecast += scenario.forecast_noise_sigma_c * forecast_rng.normal();
      }
      forecast << format_timestamp(date, slot) << ',' << format_double(t_forecast) << '\n';
    }
  }
  if (!data) raise(Errc::io_failure, "failed writing " + paths.data_csv);
  return paths;
}

}  // namespace heatcast::synth
