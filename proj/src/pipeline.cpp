#include "heatcast/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace heatcast::pipeline {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Inputs {
  data::Dataset dataset;
  features::ProfileConfig profiles;
  data::HolidaySet holidays;
};

Inputs load_inputs(const RunConfig& config) {
  if (config.data_path.empty()) raise(Errc::invalid_config, "no dataset path given");
  if (config.profiles_path.empty()) raise(Errc::invalid_config, "no profile config given");
  if (!(config.test_start <= config.test_end)) {
    raise(Errc::invalid_config, "test period start must not exceed its end");
  }
  Inputs inputs;
  inputs.holidays =
      config.holidays_path.empty() ? data::HolidaySet{} : data::load_holidays(config.holidays_path);
  inputs.dataset = data::ingest_csv(config.data_path, config.bounds, inputs.holidays);
  inputs.profiles = features::ProfileConfig::load(config.profiles_path);
  return inputs;
}

unsigned effective_workers(const RunConfig& config) {
  if (config.workers > 0) return config.workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::vector<double> read_forecast_file(const std::string& path, const Date& date) {
  std::ifstream in(path);
  if (!in) raise(Errc::missing_forecast, date.to_string() + ": no forecast file " + path);
  std::string line;
  if (!std::getline(in, line) || (line != "timestamp,t_out_c" && line != "timestamp,t_out_c\r")) {
    raise(Errc::missing_forecast, path + ": header must be `timestamp,t_out_c`");
  }
  std::vector<double> temps;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      raise(Errc::missing_forecast, path + " line " + std::to_string(line_no) + ": bad row");
    }
    const auto ts = Timestamp::parse(line.substr(0, comma));
    if (!ts || ts->date != date || !ts->on_quarter()) {
      raise(Errc::missing_forecast,
            path + " line " + std::to_string(line_no) + ": timestamp outside " + date.to_string());
    }
    const std::string value = line.substr(comma + 1);
    double t = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), t);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
      raise(Errc::missing_forecast, path + " line " + std::to_string(line_no) + ": bad value");
    }
    temps.push_back(t);
  }
  if (temps.size() != kSlotsPerDay) {
    raise(Errc::missing_forecast,
          path + ": expected 96 rows, got " + std::to_string(temps.size()));
  }
  return temps;
}

// Forecast for a prediction day: explicit file when a forecast directory is
// configured, otherwise the day's measured temperatures (perfect-forecast
// evaluation, the mode the test protocol uses).
std::vector<double> forecast_for(const Inputs& inputs, const RunConfig& config,
                                 const Date& date) {
  if (!config.forecast_dir.empty()) return read_forecast(config.forecast_dir, date);
  const data::DayRecord* day = inputs.dataset.find(date);
  if (day == nullptr || !day->temps_complete()) {
    raise(Errc::missing_forecast,
          date.to_string() + ": no measured temperatures to stand in for a forecast");
  }
  return {day->t_out.begin(), day->t_out.end()};
}

features::FeatureMatrix prediction_features(const Inputs& inputs, const Date& date,
                                            data::DayType type,
                                            std::span<const double> forecast) {
  const Date prev = add_days(date, -1);
  return features::build_day_features(date, type, forecast, inputs.profiles,
                                      data::classify_day(prev, inputs.holidays),
                                      inputs.holidays.contains(date),
                                      inputs.holidays.contains(prev));
}

void score_day(const Inputs& inputs, DayOutcome& outcome) {
  outcome.y_true.fill(kNan);
  const data::DayRecord* day = inputs.dataset.find(outcome.date);
  if (day == nullptr || !day->complete) return;
  std::copy(day->load.begin(), day->load.end(), outcome.y_true.begin());
  std::span<const double> actual(outcome.y_true.data(), kSlotsPerDay);
  std::span<const double> predicted(outcome.y_pred.data(), kSlotsPerDay);
  outcome.rmse = tuning::rmse(actual, predicted);
  try {
    outcome.r2 = tuning::r2(actual, predicted);
    outcome.scored = true;
  } catch (const Error& e) {
    if (e.code() != Errc::degenerate_actual) throw;
    outcome.scored = false;
    outcome.skip_reason = "constant measured load; R2 undefined";
  }
}

tuning::GridSearchOptions grid_options(const RunConfig& config) {
  tuning::GridSearchOptions options;
  options.folds = config.cv_folds;
  options.seed = config.seed;
  options.fold_mode = config.fold_mode;
  options.workers = effective_workers(config);
  options.train = config.train;
  return options;
}

DayOutcome run_one_relevant_day(const Inputs& inputs, const RunConfig& config,
                                const tuning::GridSpec& grid, const Date& date, int k) {
  DayOutcome outcome;
  outcome.date = date;
  outcome.type = data::classify_day(date, inputs.holidays);
  outcome.coarse = data::coarse_class(outcome.type);
  outcome.y_true.fill(kNan);

  try {
    const auto forecast = forecast_for(inputs, config, date);
    const auto query =
        selector::build_query_window(date, inputs.dataset, forecast, inputs.holidays);
    const auto candidates = selector::candidate_windows(date, outcome.type, inputs.dataset);
    const auto selection = selector::select_relevant_days(query, candidates, k);
    outcome.selection_shortfall = selection.shortfall;
    for (std::size_t i = 0; i < selection.chosen.size(); ++i) {
      outcome.selected.push_back({selection.chosen[i], selection.ranked[i].second});
    }

    const auto matrix = features::assemble_training_matrix(inputs.dataset, selection.chosen,
                                                           inputs.profiles, inputs.holidays);

    const auto t0 = Clock::now();
    const auto search = tuning::grid_search(matrix, grid, grid_options(config));
    outcome.params = search.best;

    const auto scaler = data::Scaler::fit(matrix);
    const auto scaled = scaler.apply(matrix);
    svr::TrainOptions train_opts = config.train;
    if (scaled.rows() <= train_opts.dense_gram_limit) {
      train_opts.pairwise_sqdist = svr::pairwise_squared_distances(scaled);
    }
    const auto model = svr::train_svr(scaled, search.best, train_opts);
    outcome.train_ms = ms_since(t0);
    outcome.iteration_cap_hit = model.convergence.iteration_cap_hit ||
                                search.cells[search.best_index].iteration_cap_hit;

    auto pred_rows = prediction_features(inputs, date, outcome.type, forecast);
    const auto scaled_pred = scaler.apply(pred_rows);
    const auto predicted = svr::predict(model, scaled_pred);
    std::copy(predicted.begin(), predicted.end(), outcome.y_pred.begin());

    score_day(inputs, outcome);
  } catch (const Error& e) {
    outcome.skipped = true;
    outcome.skip_reason = e.what();
  }
  return outcome;
}

void finalize_aggregates(PredictionReport& report) {
  struct Pool {
    std::vector<double> actual, predicted;
    double sum_r2 = 0.0, sum_rmse = 0.0;
    int days = 0;
  };
  Pool pools[3];  // working, weekend, overall

  for (const DayOutcome& day : report.days) {
    if (!day.scored) continue;
    const int cls = day.coarse == data::CoarseClass::working ? 0 : 1;
    for (Pool* pool : {&pools[cls], &pools[2]}) {
      pool->sum_r2 += day.r2;
      pool->sum_rmse += day.rmse;
      pool->days += 1;
      for (int i = 0; i < kSlotsPerDay; ++i) {
        pool->actual.push_back(day.y_true[i]);
        pool->predicted.push_back(day.y_pred[i]);
      }
    }
  }

  auto fill = [](ClassAggregate& agg, const Pool& pool) {
    agg.days_scored = pool.days;
    if (pool.days == 0) return;
    agg.mean_r2 = pool.sum_r2 / pool.days;
    agg.mean_rmse = pool.sum_rmse / pool.days;
    agg.pooled_rmse = tuning::rmse(pool.actual, pool.predicted);
    try {
      agg.pooled_r2 = tuning::r2(pool.actual, pool.predicted);
    } catch (const Error&) {
      agg.pooled_r2 = kNan;
    }
  };
  fill(report.working, pools[0]);
  fill(report.weekend, pools[1]);
  fill(report.overall, pools[2]);

  double working_ms = 0.0, weekend_ms = 0.0;
  for (const DayOutcome& day : report.days) {
    (day.coarse == data::CoarseClass::working ? working_ms : weekend_ms) += day.train_ms;
  }
  if (report.whole_working) working_ms += report.whole_working->train_ms;
  if (report.whole_weekend) weekend_ms += report.whole_weekend->train_ms;
  report.working.train_ms = working_ms;
  report.weekend.train_ms = weekend_ms;
  report.overall.train_ms = working_ms + weekend_ms;
  report.total_train_ms = report.overall.train_ms;
}

std::vector<Date> test_dates(const RunConfig& config) {
  std::vector<Date> dates;
  for (Date d = config.test_start; d <= config.test_end; d = add_days(d, 1)) dates.push_back(d);
  return dates;
}

}  // namespace

std::string_view to_string(Mode mode) { return mode == Mode::relevant ? "relevant" : "whole"; }

std::vector<double> read_forecast(const std::string& forecast_dir, const Date& date) {
  const auto path = (fs::path(forecast_dir) / (date.to_string() + ".csv")).string();
  return read_forecast_file(path, date);
}

PredictionReport run_relevant(const RunConfig& config) {
  const Inputs inputs = load_inputs(config);
  const auto grid =
      tuning::GridSpec::named_or_file(config.grid.empty() ? "relevant" : config.grid);

  PredictionReport report;
  report.mode = Mode::relevant;
  report.config = config;
  for (const Date& date : test_dates(config)) {
    report.days.push_back(run_one_relevant_day(inputs, config, grid, date, config.k));
  }
  finalize_aggregates(report);
  return report;
}

PredictionReport run_whole(const RunConfig& config) {
  const Inputs inputs = load_inputs(config);
  const auto grid = tuning::GridSpec::named_or_file(config.grid.empty() ? "whole" : config.grid);

  PredictionReport report;
  report.mode = Mode::whole;
  report.config = config;

  const auto dates = test_dates(config);
  bool class_needed[2] = {false, false};
  for (const Date& date : dates) {
    const auto type = data::classify_day(date, inputs.holidays);
    class_needed[data::coarse_class(type) == data::CoarseClass::working ? 0 : 1] = true;
  }

  struct ClassModel {
    bool available = false;
    svr::SvrModel model;
    data::Scaler scaler;
    WholeModelInfo info;
    std::string failure;
  };
  ClassModel models[2];

  for (int cls = 0; cls < 2; ++cls) {
    if (!class_needed[cls]) continue;
    const auto coarse = cls == 0 ? data::CoarseClass::working : data::CoarseClass::weekend;
    std::vector<Date> train_days;
    for (const data::DayRecord& day : inputs.dataset.days) {
      if (day.date >= config.test_start) break;
      if (day.complete && data::coarse_class(day.type) == coarse) train_days.push_back(day.date);
    }
    if (train_days.empty()) {
      models[cls].failure = std::string(data::to_string(coarse)) + ": no training days";
      continue;
    }
    const auto matrix = features::assemble_training_matrix(inputs.dataset, train_days,
                                                           inputs.profiles, inputs.holidays);
    const auto t0 = Clock::now();
    const auto search = tuning::grid_search(matrix, grid, grid_options(config));
    const auto scaler = data::Scaler::fit(matrix);
    const auto scaled = scaler.apply(matrix);
    svr::TrainOptions train_opts = config.train;
    if (scaled.rows() <= train_opts.dense_gram_limit) {
      train_opts.pairwise_sqdist = svr::pairwise_squared_distances(scaled);
    }
    auto model = svr::train_svr(scaled, search.best, train_opts);

    ClassModel& slot = models[cls];
    slot.available = true;
    slot.scaler = scaler;
    slot.info.params = search.best;
    slot.info.rows = matrix.rows();
    slot.info.train_ms = ms_since(t0);
    slot.info.iteration_cap_hit = model.convergence.iteration_cap_hit ||
                                  search.cells[search.best_index].iteration_cap_hit;
    slot.model = std::move(model);
  }

  if (models[0].available) report.whole_working = models[0].info;
  if (models[1].available) report.whole_weekend = models[1].info;

  for (const Date& date : dates) {
    DayOutcome outcome;
    outcome.date = date;
    outcome.type = data::classify_day(date, inputs.holidays);
    outcome.coarse = data::coarse_class(outcome.type);
    outcome.y_true.fill(kNan);
    ClassModel& slot = models[outcome.coarse == data::CoarseClass::working ? 0 : 1];
    if (!slot.available) {
      outcome.skipped = true;
      outcome.skip_reason = slot.failure.empty() ? "class model unavailable" : slot.failure;
      report.days.push_back(outcome);
      continue;
    }
    try {
      const auto forecast = forecast_for(inputs, config, date);
      auto pred_rows = prediction_features(inputs, date, outcome.type, forecast);
      const auto scaled_pred = slot.scaler.apply(pred_rows);
      const auto predicted = svr::predict(slot.model, scaled_pred);
      std::copy(predicted.begin(), predicted.end(), outcome.y_pred.begin());
      outcome.params = slot.info.params;
      outcome.iteration_cap_hit = slot.info.iteration_cap_hit;
      score_day(inputs, outcome);
    } catch (const Error& e) {
      outcome.skipped = true;
      outcome.skip_reason = e.what();
    }
    report.days.push_back(outcome);
  }

  finalize_aggregates(report);

  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    if (models[0].available) {
      svr::save_model(models[0].model, (fs::path(config.out_dir) / "model_working.json").string());
    }
    if (models[1].available) {
      svr::save_model(models[1].model, (fs::path(config.out_dir) / "model_weekend.json").string());
    }
  }
  return report;
}

PredictionReport run(const RunConfig& config) {
  return config.mode == Mode::relevant ? run_relevant(config) : run_whole(config);
}

namespace {

std::string day_status(const DayOutcome& day) {
  if (day.skipped) return "skipped";
  return day.scored ? "scored" : "unscored";
}

nlohmann::ordered_json config_to_json(const RunConfig& config) {
  nlohmann::ordered_json doc;
  doc["mode"] = std::string(to_string(config.mode));
  doc["data"] = config.data_path;
  doc["profiles"] = config.profiles_path;
  doc["forecasts"] = config.forecast_dir;
  doc["holidays"] = config.holidays_path;
  doc["k"] = config.k;
  doc["grid"] = config.grid;
  doc["test_start"] = config.test_start.to_string();
  doc["test_end"] = config.test_end.to_string();
  doc["seed"] = config.seed;
  doc["cv_folds"] = config.cv_folds;
  doc["fold_mode"] = config.fold_mode == tuning::FoldMode::day_blocked ? "day_blocked" : "rows";
  doc["tolerance"] = config.train.tolerance;
  doc["max_iterations"] = config.train.max_iterations;
  return doc;
}

nlohmann::ordered_json aggregate_to_json(const ClassAggregate& agg) {
  nlohmann::ordered_json doc;
  doc["days_scored"] = agg.days_scored;
  doc["mean_r2"] = agg.mean_r2;
  doc["mean_rmse"] = agg.mean_rmse;
  doc["pooled_r2"] = std::isfinite(agg.pooled_r2) ? agg.pooled_r2 : 0.0;
  doc["pooled_rmse"] = agg.pooled_rmse;
  return doc;
}

std::string seconds_text(double ms) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(1);
  out << ms / 1000.0 << " s";
  return out.str();
}

struct SummaryCard {
  std::string mode;
  double working_r2 = 0.0, working_rmse = 0.0, weekend_r2 = 0.0, weekend_rmse = 0.0;
  int working_days = 0, weekend_days = 0;
  double working_ms = 0.0, weekend_ms = 0.0;
};

SummaryCard card_from_report(const PredictionReport& report) {
  SummaryCard card;
  card.mode = std::string(to_string(report.mode));
  card.working_r2 = report.working.mean_r2;
  card.working_rmse = report.working.mean_rmse;
  card.weekend_r2 = report.weekend.mean_r2;
  card.weekend_rmse = report.weekend.mean_rmse;
  card.working_days = report.working.days_scored;
  card.weekend_days = report.weekend.days_scored;
  card.working_ms = report.working.train_ms;
  card.weekend_ms = report.weekend.train_ms;
  return card;
}

std::string render_comparison(const SummaryCard& a, const SummaryCard& b) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  auto row = [&](const std::string& label, const std::string& w1, const std::string& w2,
                 const std::string& e1, const std::string& e2) {
    out << std::left;
    out.width(16);
    out << label;
    for (const std::string& cell : {w1, w2, e1, e2}) {
      out.width(18);
      out << cell;
    }
    out << "\n";
  };
  auto num = [](double v, int prec) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(prec);
    s << v;
    return s.str();
  };
  out << "Performance and training time by day-type class (per-day means)\n\n";
  row("", "working/" + a.mode, "working/" + b.mode, "weekend/" + a.mode, "weekend/" + b.mode);
  row("R2", num(a.working_r2, 3), num(b.working_r2, 3), num(a.weekend_r2, 3),
      num(b.weekend_r2, 3));
  row("RMSE (kW)", num(a.working_rmse, 1), num(b.working_rmse, 1), num(a.weekend_rmse, 1),
      num(b.weekend_rmse, 1));
  row("Training time", seconds_text(a.working_ms), seconds_text(b.working_ms),
      seconds_text(a.weekend_ms), seconds_text(b.weekend_ms));
  row("Days scored", std::to_string(a.working_days), std::to_string(b.working_days),
      std::to_string(a.weekend_days), std::to_string(b.weekend_days));
  return out.str();
}

}  // namespace

void emit_report(const PredictionReport& report, const std::string& out_dir) {
  if (report.days.empty()) raise(Errc::io_failure, "emit_report: empty report");
  fs::create_directories(out_dir);

  {
    std::ofstream out(fs::path(out_dir) / "predictions.csv");
    if (!out) raise(Errc::io_failure, "cannot write predictions.csv");
    out << "timestamp,y_true,y_pred\n";
    for (const DayOutcome& day : report.days) {
      if (day.skipped) continue;
      for (int slot = 1; slot <= kSlotsPerDay; ++slot) {
        out << format_timestamp(day.date, slot) << ',';
        if (std::isfinite(day.y_true[slot - 1])) out << format_double(day.y_true[slot - 1]);
        out << ',' << format_double(day.y_pred[slot - 1]) << '\n';
      }
    }
  }

  {
    std::ofstream out(fs::path(out_dir) / "daily_metrics.csv");
    if (!out) raise(Errc::io_failure, "cannot write daily_metrics.csv");
    out << "date,day_type,class,status,r2,rmse\n";
    for (const DayOutcome& day : report.days) {
      out << day.date.to_string() << ',' << data::to_string(day.type) << ','
          << data::to_string(day.coarse) << ',' << day_status(day) << ',';
      if (day.scored) out << format_double(day.r2);
      out << ',';
      if (day.scored) out << format_double(day.rmse);
      out << '\n';
    }
  }

  {
    nlohmann::ordered_json doc;
    doc["format"] = "heatcast-report";
    doc["version"] = 1;
    doc["mode"] = std::string(to_string(report.mode));
    doc["config"] = config_to_json(report.config);
    nlohmann::ordered_json days = nlohmann::ordered_json::array();
    for (const DayOutcome& day : report.days) {
      nlohmann::ordered_json entry;
      entry["date"] = day.date.to_string();
      entry["day_type"] = std::string(data::to_string(day.type));
      entry["class"] = std::string(data::to_string(day.coarse));
      entry["status"] = day_status(day);
      if (day.skipped) {
        entry["skip_reason"] = day.skip_reason;
      } else {
        entry["params"] = {{"c", day.params.c},
                           {"gamma", day.params.gamma},
                           {"epsilon", day.params.epsilon}};
        if (report.mode == Mode::relevant) {
          nlohmann::ordered_json selected = nlohmann::ordered_json::array();
          for (const SelectedDay& s : day.selected) {
            selected.push_back({{"date", s.date.to_string()}, {"distance", s.distance}});
          }
          entry["selected_days"] = selected;
          entry["selection_shortfall"] = day.selection_shortfall;
        }
        entry["iteration_cap_hit"] = day.iteration_cap_hit;
        if (day.scored) {
          entry["r2"] = day.r2;
          entry["rmse"] = day.rmse;
        } else if (!day.skip_reason.empty()) {
          entry["note"] = day.skip_reason;
        }
      }
      days.push_back(entry);
    }
    doc["days"] = days;
    doc["aggregates"] = {{"working", aggregate_to_json(report.working)},
                         {"weekend", aggregate_to_json(report.weekend)},
                         {"overall", aggregate_to_json(report.overall)}};
    if (report.whole_working) {
      doc["whole_working_model"] = {{"rows", report.whole_working->rows},
                                    {"c", report.whole_working->params.c},
                                    {"gamma", report.whole_working->params.gamma},
                                    {"epsilon", report.whole_working->params.epsilon}};
    }
    if (report.whole_weekend) {
      doc["whole_weekend_model"] = {{"rows", report.whole_weekend->rows},
                                    {"c", report.whole_weekend->params.c},
                                    {"gamma", report.whole_weekend->params.gamma},
                                    {"epsilon", report.whole_weekend->params.epsilon}};
    }
    std::ofstream out(fs::path(out_dir) / "metrics.json");
    if (!out) raise(Errc::io_failure, "cannot write metrics.json");
    out << doc.dump(2) << "\n";
  }

  {
    nlohmann::ordered_json doc;
    doc["total_train_ms"] = report.total_train_ms;
    doc["per_class"] = {{"working", report.working.train_ms},
                        {"weekend", report.weekend.train_ms}};
    nlohmann::ordered_json days = nlohmann::ordered_json::array();
    for (const DayOutcome& day : report.days) {
      if (day.skipped) continue;
      days.push_back({{"date", day.date.to_string()}, {"train_ms", day.train_ms}});
    }
    doc["days"] = days;
    if (report.whole_working) doc["whole_working_ms"] = report.whole_working->train_ms;
    if (report.whole_weekend) doc["whole_weekend_ms"] = report.whole_weekend->train_ms;
    std::ofstream out(fs::path(out_dir) / "timing.json");
    if (!out) raise(Errc::io_failure, "cannot write timing.json");
    out << doc.dump(2) << "\n";
  }

  {
    std::ofstream out(fs::path(out_dir) / "summary.txt");
    if (!out) raise(Errc::io_failure, "cannot write summary.txt");
    out << "mode: " << to_string(report.mode) << "\n";
    out << "test period: " << report.config.test_start.to_string() << " .. "
        << report.config.test_end.to_string() << "\n\n";
    auto line = [&](const char* label, const ClassAggregate& agg) {
      out << label << ": days=" << agg.days_scored;
      out.setf(std::ios::fixed);
      out.precision(4);
      out << " mean_r2=" << agg.mean_r2 << " mean_rmse=" << agg.mean_rmse
          << " train=" << seconds_text(agg.train_ms) << "\n";
    };
    line("working", report.working);
    line("weekend", report.weekend);
    line("overall", report.overall);
  }
}

std::string compare_summary(const PredictionReport& relevant, const PredictionReport& whole) {
  return render_comparison(card_from_report(relevant), card_from_report(whole));
}

namespace {

SummaryCard card_from_dir(const std::string& dir) {
  std::ifstream metrics_in(fs::path(dir) / "metrics.json");
  if (!metrics_in) raise(Errc::io_failure, "cannot open " + dir + "/metrics.json");
  std::ifstream timing_in(fs::path(dir) / "timing.json");
  if (!timing_in) raise(Errc::io_failure, "cannot open " + dir + "/timing.json");
  nlohmann::json metrics = nlohmann::json::parse(metrics_in);
  nlohmann::json timing = nlohmann::json::parse(timing_in);

  SummaryCard card;
  card.mode = metrics.value("mode", "?");
  const auto& agg = metrics.at("aggregates");
  card.working_r2 = agg.at("working").value("mean_r2", 0.0);
  card.working_rmse = agg.at("working").value("mean_rmse", 0.0);
  card.weekend_r2 = agg.at("weekend").value("mean_r2", 0.0);
  card.weekend_rmse = agg.at("weekend").value("mean_rmse", 0.0);
  card.working_days = agg.at("working").value("days_scored", 0);
  card.weekend_days = agg.at("weekend").value("days_scored", 0);
  card.working_ms = timing.at("per_class").value("working", 0.0);
  card.weekend_ms = timing.at("per_class").value("weekend", 0.0);
  return card;
}

}  // namespace

std::string compare_summary_from_dirs(const std::string& relevant_dir,
                                      const std::string& whole_dir) {
  return render_comparison(card_from_dir(relevant_dir), card_from_dir(whole_dir));
}

selector::SweepResult sweep_k(const RunConfig& config, int k_min, int k_max) {
  if (config.out_dir.empty()) raise(Errc::invalid_config, "sweep_k needs an output directory");
  const Inputs inputs = load_inputs(config);
  const auto grid =
      tuning::GridSpec::named_or_file(config.grid.empty() ? "relevant" : config.grid);
  const auto dates = test_dates(config);

  std::map<int, std::vector<DayOutcome>> outcomes;
  const auto runner = [&](const Date& date,
                          int k) -> std::optional<std::pair<double, double>> {
    DayOutcome outcome = run_one_relevant_day(inputs, config, grid, date, k);
    const bool scored = outcome.scored;
    const double r2 = outcome.r2;
    const double rmse = outcome.rmse;
    outcomes[k].push_back(std::move(outcome));
    if (!scored) return std::nullopt;
    return std::make_pair(r2, rmse);
  };

  const auto sweep = selector::sweep_k(dates, k_min, k_max, runner);

  fs::create_directories(config.out_dir);
  for (const auto& [k, days] : outcomes) {
    PredictionReport report;
    report.mode = Mode::relevant;
    report.config = config;
    report.config.k = k;
    report.days = days;
    finalize_aggregates(report);
    char name[16];
    std::snprintf(name, sizeof(name), "k_%02d", k);
    emit_report(report, (fs::path(config.out_dir) / name).string());
  }
  {
    std::ofstream out(fs::path(config.out_dir) / "sweep_k.csv");
    if (!out) raise(Errc::io_failure, "cannot write sweep_k.csv");
    out << "k,mean_r2,mean_rmse,days_scored\n";
    for (const auto& row : sweep.rows) {
      out << row.k << ',' << format_double(row.mean_r2) << ',' << format_double(row.mean_rmse)
          << ',' << row.days_scored << '\n';
    }
    out << "# best_k," << sweep.best_k << "\n";
  }
  return sweep;
}

}  // namespace heatcast::pipeline
