#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace heatcast {

enum class Errc {
  // dataset
  missing_column,
  unparsable_timestamp,
  empty_file,
  degenerate_column,
  // features
  slot_out_of_range,
  missing_temperature,
  incomplete_day,
  empty_selection,
  // dtw
  empty_series,
  band_infeasible,
  length_mismatch,
  // selector
  missing_history,
  missing_forecast,
  empty_pool,
  // svr
  dimension_mismatch,
  not_scaled,
  singular_input,
  scaler_mismatch,
  // tuning
  too_few_samples,
  degenerate_actual,
  degenerate_series,
  // pipeline
  invalid_scenario,
  io_failure,
  invalid_config,
};

std::string_view to_string(Errc code);

// Input/validation failures map to CLI exit code 2, everything else to 3.
bool is_data_error(Errc code);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

// Shortest decimal string that round-trips the exact double. Every number we
// emit goes through this so re-ingesting our own files reproduces the values
// bit for bit.
std::string format_double(double v);
std::string format_double_fixed(double v, int precision);

// Deterministic random stream: mt19937_64 plus hand-rolled transforms, since
// the std:: distribution algorithms differ between standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }  // [0,1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal();  // Box-Muller with cached spare

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace heatcast
