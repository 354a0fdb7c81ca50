#include "heatcast/common.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace heatcast {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::missing_column: return "MissingColumn";
    case Errc::unparsable_timestamp: return "UnparsableTimestamp";
    case Errc::empty_file: return "EmptyFile";
    case Errc::degenerate_column: return "DegenerateColumn";
    case Errc::slot_out_of_range: return "SlotOutOfRange";
    case Errc::missing_temperature: return "MissingTemperature";
    case Errc::incomplete_day: return "IncompleteDay";
    case Errc::empty_selection: return "EmptySelection";
    case Errc::empty_series: return "EmptySeries";
    case Errc::band_infeasible: return "BandInfeasible";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::missing_history: return "MissingHistory";
    case Errc::missing_forecast: return "MissingForecast";
    case Errc::empty_pool: return "EmptyPool";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::not_scaled: return "NotScaled";
    case Errc::singular_input: return "SingularInput";
    case Errc::scaler_mismatch: return "ScalerMismatch";
    case Errc::too_few_samples: return "TooFewSamples";
    case Errc::degenerate_actual: return "DegenerateActual";
    case Errc::degenerate_series: return "DegenerateSeries";
    case Errc::invalid_scenario: return "InvalidScenario";
    case Errc::io_failure: return "IoFailure";
    case Errc::invalid_config: return "InvalidConfig";
  }
  return "UnknownError";
}

bool is_data_error(Errc code) {
  switch (code) {
    case Errc::missing_column:
    case Errc::unparsable_timestamp:
    case Errc::empty_file:
    case Errc::slot_out_of_range:
    case Errc::missing_temperature:
    case Errc::incomplete_day:
    case Errc::empty_selection:
    case Errc::missing_history:
    case Errc::missing_forecast:
    case Errc::empty_pool:
    case Errc::invalid_scenario:
    case Errc::invalid_config:
    case Errc::io_failure:
      return true;
    default:
      return false;
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  }
  return std::string(buf, ptr);
}

std::string format_double_fixed(double v, int precision) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
  if (ec != std::errc{}) {
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return std::string(buf);
  }
  return std::string(buf, ptr);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace heatcast
