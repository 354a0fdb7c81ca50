#include "heatcast/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "heatcast/features.hpp"

namespace heatcast::data {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr char kCsvHeader[] = "timestamp,t_out_c,load_kw";

bool is_missing(double v) { return std::isnan(v); }

std::optional<double> parse_field(std::string_view field) {
  if (field.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) return std::nullopt;
  return v;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

struct GapFillResult {
  int interpolated = 0;
  int edge_filled = 0;
  int longest_unfilled = 0;
};

// Fills NaN runs of length <= limit: interior runs linearly, day-edge runs by
// copying the nearest present value. Longer runs are left missing and their
// length reported.
GapFillResult fill_gaps(std::array<double, kSlotsPerDay>& values, int limit) {
  GapFillResult result;
  int i = 0;
  while (i < kSlotsPerDay) {
    if (!is_missing(values[i])) {
      ++i;
      continue;
    }
    int j = i;
    while (j < kSlotsPerDay && is_missing(values[j])) ++j;
    const int run = j - i;
    const bool left_edge = i == 0;
    const bool right_edge = j == kSlotsPerDay;
    if (run <= limit && !(left_edge && right_edge)) {
      if (left_edge) {
        for (int s = i; s < j; ++s) values[s] = values[j];
        result.edge_filled += run;
      } else if (right_edge) {
        for (int s = i; s < j; ++s) values[s] = values[i - 1];
        result.edge_filled += run;
      } else {
        const double lo = values[i - 1];
        const double hi = values[j];
        for (int s = i; s < j; ++s) {
          const double t = static_cast<double>(s - i + 1) / (run + 1);
          values[s] = lo + (hi - lo) * t;
        }
        result.interpolated += run;
      }
    } else {
      result.longest_unfilled = std::max(result.longest_unfilled, run);
    }
    i = j;
  }
  return result;
}

}  // namespace

CoarseClass coarse_class(DayType type) {
  switch (type) {
    case DayType::working_monday:
    case DayType::working_other:
      return CoarseClass::working;
    default:
      return CoarseClass::weekend;
  }
}

std::string_view to_string(DayType type) {
  switch (type) {
    case DayType::working_monday: return "working_monday";
    case DayType::working_other: return "working_other";
    case DayType::saturday: return "saturday";
    case DayType::sunday: return "sunday";
  }
  return "unknown";
}

std::string_view to_string(CoarseClass cls) {
  return cls == CoarseClass::working ? "working" : "weekend";
}

std::optional<DayType> parse_day_type(std::string_view name) {
  if (name == "working_monday") return DayType::working_monday;
  if (name == "working_other") return DayType::working_other;
  if (name == "saturday") return DayType::saturday;
  if (name == "sunday") return DayType::sunday;
  return std::nullopt;
}

std::string_view to_string(CleanEvent::Kind kind) {
  switch (kind) {
    case CleanEvent::Kind::out_of_bounds: return "out_of_bounds";
    case CleanEvent::Kind::interpolated: return "interpolated";
    case CleanEvent::Kind::edge_filled: return "edge_filled";
    case CleanEvent::Kind::day_dropped: return "day_dropped";
    case CleanEvent::Kind::day_incomplete: return "day_incomplete";
    case CleanEvent::Kind::row_ignored: return "row_ignored";
  }
  return "unknown";
}

HolidaySet load_holidays(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_failure, "cannot open holiday list " + path);
  HolidaySet holidays;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = strip_cr(line);
    if (text.empty() || text.front() == '#') continue;
    auto date = Date::parse(text);
    if (!date) {
      raise(Errc::invalid_config,
            "holiday list " + path + " line " + std::to_string(line_no) + ": not an ISO date");
    }
    holidays.insert(*date);
  }
  return holidays;
}

DayType classify_day(const Date& date, const HolidaySet& holidays) {
  if (holidays.contains(date)) return DayType::saturday;
  switch (weekday(date)) {
    case 0: return DayType::working_monday;
    case 5: return DayType::saturday;
    case 6: return DayType::sunday;
    default: return DayType::working_other;
  }
}

bool DayRecord::temps_complete() const {
  return std::none_of(t_out.begin(), t_out.end(), is_missing);
}

bool DayRecord::loads_complete() const {
  return std::none_of(load.begin(), load.end(), is_missing);
}

Sample DayRecord::sample(int slot) const {
  Sample s;
  s.ts = Timestamp{date, slot_minute(slot)};
  const double t = t_out[slot - 1];
  const double y = load[slot - 1];
  if (!is_missing(t)) s.t_out = t;
  if (!is_missing(y)) s.load = y;
  return s;
}

const DayRecord* Dataset::find(const Date& date) const {
  auto it = std::lower_bound(days.begin(), days.end(), date,
                             [](const DayRecord& r, const Date& d) { return r.date < d; });
  if (it == days.end() || it->date != date) return nullptr;
  return &*it;
}

Dataset clean_and_segment(std::vector<Sample> samples, const Bounds& bounds,
                          const HolidaySet& holidays, std::string source) {
  Dataset dataset;
  dataset.source = std::move(source);

  std::map<Date, DayRecord> by_date;
  for (const Sample& s : samples) {
    DayRecord& day = by_date[s.ts.date];
    if (day.date != s.ts.date) {
      day.date = s.ts.date;
      day.t_out.fill(kNan);
      day.load.fill(kNan);
    }
    const int idx = s.ts.slot() - 1;
    if (!is_missing(day.t_out[idx]) || !is_missing(day.load[idx])) {
      dataset.log.push_back({CleanEvent::Kind::row_ignored, s.ts.date, s.ts.slot(),
                             "duplicate timestamp " + s.ts.to_string()});
      continue;
    }
    if (s.t_out) {
      if (*s.t_out < bounds.t_out_min || *s.t_out > bounds.t_out_max) {
        dataset.log.push_back({CleanEvent::Kind::out_of_bounds, s.ts.date, s.ts.slot(),
                               "t_out " + format_double(*s.t_out) + " treated as missing"});
      } else {
        day.t_out[idx] = *s.t_out;
      }
    }
    if (s.load) {
      if (*s.load < bounds.load_min || *s.load > bounds.load_max) {
        dataset.log.push_back({CleanEvent::Kind::out_of_bounds, s.ts.date, s.ts.slot(),
                               "load " + format_double(*s.load) + " treated as missing"});
      } else {
        day.load[idx] = *s.load;
      }
    }
  }

  for (auto& [date, day] : by_date) {
    day.type = classify_day(date, holidays);

    const auto temp_fill = fill_gaps(day.t_out, bounds.temp_gap_limit);
    if (temp_fill.interpolated + temp_fill.edge_filled > 0) {
      dataset.log.push_back({CleanEvent::Kind::interpolated, date, 0,
                             "temperature: " +
                                 std::to_string(temp_fill.interpolated + temp_fill.edge_filled) +
                                 " samples filled"});
    }
    if (!day.temps_complete()) {
      dataset.log.push_back({CleanEvent::Kind::day_dropped, date, 0,
                             "temperature gap of " + std::to_string(temp_fill.longest_unfilled) +
                                 " samples exceeds limit " +
                                 std::to_string(bounds.temp_gap_limit)});
      continue;
    }

    const bool any_load =
        std::any_of(day.load.begin(), day.load.end(), [](double v) { return !is_missing(v); });
    if (any_load) {
      const auto load_fill = fill_gaps(day.load, bounds.load_gap_limit);
      if (load_fill.interpolated + load_fill.edge_filled > 0) {
        dataset.log.push_back({CleanEvent::Kind::interpolated, date, 0,
                               "load: " +
                                   std::to_string(load_fill.interpolated + load_fill.edge_filled) +
                                   " samples filled"});
      }
      day.complete = day.loads_complete();
      if (!day.complete) {
        dataset.log.push_back({CleanEvent::Kind::day_incomplete, date, 0,
                               "load gap of " + std::to_string(load_fill.longest_unfilled) +
                                   " samples exceeds limit " +
                                   std::to_string(bounds.load_gap_limit)});
      }
    } else {
      day.complete = false;  // future/prediction day, temperatures only
    }
    dataset.days.push_back(day);
  }
  return dataset;
}

Dataset ingest_csv(const std::string& path, const Bounds& bounds, const HolidaySet& holidays) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_failure, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) raise(Errc::empty_file, path + " has no header row");
  if (strip_cr(line) != kCsvHeader) {
    raise(Errc::missing_column,
          path + " header must be exactly `" + kCsvHeader + "`, got `" + line + "`");
  }

  std::vector<Sample> samples;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = strip_cr(line);
    if (text.empty()) continue;

    std::array<std::string_view, 3> fields;
    std::size_t field_count = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || text[i] == ',') {
        if (field_count < 3) fields[field_count] = text.substr(start, i - start);
        ++field_count;
        start = i + 1;
      }
    }
    if (field_count != 3) {
      raise(Errc::unparsable_timestamp, path + " line " + std::to_string(line_no) +
                                            ": expected 3 fields, got " +
                                            std::to_string(field_count));
    }

    auto ts = Timestamp::parse(fields[0]);
    if (!ts || !ts->on_quarter()) {
      raise(Errc::unparsable_timestamp, path + " line " + std::to_string(line_no) + ": `" +
                                            std::string(fields[0]) +
                                            "` is not a 15-minute local timestamp");
    }

    Sample s;
    s.ts = *ts;
    s.t_out = parse_field(fields[1]);
    s.load = parse_field(fields[2]);
    samples.push_back(s);
  }
  if (samples.empty()) raise(Errc::empty_file, path + " has no data rows");

  std::stable_sort(samples.begin(), samples.end(),
                   [](const Sample& a, const Sample& b) { return a.ts < b.ts; });
  return clean_and_segment(std::move(samples), bounds, holidays, path);
}

void write_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(Errc::io_failure, "cannot write " + path);
  out << kCsvHeader << "\n";
  for (const DayRecord& day : dataset.days) {
    for (int slot = 1; slot <= kSlotsPerDay; ++slot) {
      out << format_timestamp(day.date, slot) << ',';
      if (!is_missing(day.t_out[slot - 1])) out << format_double(day.t_out[slot - 1]);
      out << ',';
      if (!is_missing(day.load[slot - 1])) out << format_double(day.load[slot - 1]);
      out << '\n';
    }
  }
  if (!out) raise(Errc::io_failure, "failed writing " + path);
}

Scaler Scaler::fit(const features::FeatureMatrix& matrix) {
  const std::size_t n = matrix.rows();
  const std::size_t m = matrix.cols();
  if (n == 0) raise(Errc::empty_selection, "fit_scaler: empty matrix");

  Scaler scaler;
  scaler.mean_.assign(m, 0.0);
  scaler.std_.assign(m, 1.0);

  for (std::size_t j = 0; j < m; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += matrix.row(i)[j];
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = matrix.row(i)[j] - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));  // population convention
    scaler.mean_[j] = mean;
    if (sd < 1e-12 * std::max(1.0, std::abs(mean))) {
      scaler.std_[j] = 1.0;  // constant column: center only
      scaler.degenerate_.push_back(j);
    } else {
      scaler.std_[j] = sd;
    }
  }

  if (matrix.has_targets()) {
    const auto& y = matrix.targets();
    double sum = 0.0;
    for (double v : y) sum += v;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    scaler.target_mean_ = mean;
    if (sd < 1e-12 * std::max(1.0, std::abs(mean))) {
      scaler.target_std_ = 1.0;
      scaler.degenerate_.push_back(m);  // sentinel index m marks the target
    } else {
      scaler.target_std_ = sd;
    }
    scaler.has_target_stats_ = true;
  }
  return scaler;
}

features::FeatureMatrix Scaler::apply(const features::FeatureMatrix& matrix) const {
  if (matrix.cols() != cols()) {
    raise(Errc::dimension_mismatch, "apply_scaler: matrix has " + std::to_string(matrix.cols()) +
                                        " columns, scaler " + std::to_string(cols()));
  }
  if (matrix.scaled()) raise(Errc::invalid_config, "apply_scaler: matrix is already scaled");

  features::FeatureMatrix out = matrix;
  auto& values = out.values();
  const std::size_t m = cols();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      values[i * m + j] = (values[i * m + j] - mean_[j]) / std_[j];
    }
  }
  if (out.has_targets() && has_target_stats_) {
    for (double& y : out.targets()) y = scale_target(y);
  }
  out.set_scaler(*this);
  return out;
}

features::FeatureMatrix Scaler::invert(const features::FeatureMatrix& matrix) const {
  if (!matrix.scaled() || !(*matrix.scaler() == *this)) {
    raise(Errc::scaler_mismatch, "invert_scaler: matrix was not scaled with this scaler");
  }
  features::FeatureMatrix out = matrix;
  auto& values = out.values();
  const std::size_t m = cols();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      values[i * m + j] = values[i * m + j] * std_[j] + mean_[j];
    }
  }
  if (out.has_targets() && has_target_stats_) {
    for (double& y : out.targets()) y = unscale_target(y);
  }
  out.clear_scaler();
  return out;
}

Scaler Scaler::from_stats(std::vector<double> means, std::vector<double> stds, double target_mean,
                          double target_std, bool has_target_stats,
                          std::vector<std::size_t> degenerate) {
  Scaler s;
  s.mean_ = std::move(means);
  s.std_ = std::move(stds);
  s.target_mean_ = target_mean;
  s.target_std_ = target_std;
  s.has_target_stats_ = has_target_stats;
  s.degenerate_ = std::move(degenerate);
  return s;
}

Scaler fit_scaler(const features::FeatureMatrix& matrix) { return Scaler::fit(matrix); }

features::FeatureMatrix apply_scaler(const Scaler& scaler, const features::FeatureMatrix& matrix) {
  return scaler.apply(matrix);
}

features::FeatureMatrix invert_scaler(const Scaler& scaler, const features::FeatureMatrix& matrix) {
  return scaler.invert(matrix);
}

}  // namespace heatcast::data
