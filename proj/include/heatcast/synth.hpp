#pragma once

#include <cstdint>
#include <string>

#include "heatcast/time.hpp"

namespace heatcast::synth {

// Desk-scale stand-in for a metered office building: a first-order lumped
// thermal model driven by a seeded weather process. Interior temperature
// relaxes toward the schedule-driven set-point; load is clamped proportional
// heating power plus measurement noise.
struct Scenario {
  Date start{2013, 9, 23};  // a Monday keeps whole weeks aligned

  // weather: seasonal + diurnal sinusoids + AR(1) noise
  double t_mean_c = 4.5;
  double seasonal_amplitude_c = 5.5;
  double cold_center_day = 100.0;  // corpus day index of the seasonal minimum
  double diurnal_amplitude_c = 3.5;
  double noise_sigma_c = 1.1;
  double noise_phi = 0.985;  // AR(1) coefficient per 15-min step
  double t_floor_c = -15.0;  // declared corpus bounds, checked by tests
  double t_ceiling_c = 22.0;

  // building
  double heat_loss_kw_per_k = 50.0;          // UA
  double thermal_capacity_kwh_per_k = 300.0; // C; tau = C/UA = 6 h
  double t_comfort_c = 21.0;
  double t_setback_c = 6.0;
  double control_gain_kw_per_k = 400.0;
  double peak_power_kw = 1500.0;
  double measurement_noise_kw = 4.0;

  double forecast_noise_sigma_c = 0.0;  // 0 = forecasts equal measured temps
};

struct SynthPaths {
  std::string data_csv;
  std::string profiles_json;
  std::string forecast_dir;
  std::string holidays_txt;
};

// Writes data.csv, profiles.json, holidays.txt and one forecast file per day
// under out_dir. Byte-identical for identical (days, seed, scenario).
SynthPaths generate_synthetic(const std::string& out_dir, int days, std::uint64_t seed,
                              const Scenario& scenario = {});

}  // namespace heatcast::synth
