#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heatcast/pipeline.hpp"
#include "heatcast/synth.hpp"

namespace {

using namespace heatcast;

Date parse_date_flag(const std::string& text, const std::string& flag) {
  auto date = Date::parse(text);
  if (!date) raise(Errc::invalid_config, flag + ": `" + text + "` is not an ISO date");
  return *date;
}

struct CommonFlags {
  std::string data, profiles, forecasts, holidays, grid, out;
  std::string test_start, test_end;
  std::string fold_mode = "day";
  int k = 12;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  double tolerance = 1e-3;
  std::uint64_t max_iterations = 10'000'000;
  std::size_t cache_mb = 100;
};

void add_run_flags(CLI::App* cmd, CommonFlags& flags, bool needs_test_period) {
  cmd->add_option("--data", flags.data, "dataset CSV")->required();
  cmd->add_option("--profiles", flags.profiles, "profile config JSON")->required();
  cmd->add_option("--forecasts", flags.forecasts,
                  "forecast directory (default: measured temperatures stand in)");
  cmd->add_option("--holidays", flags.holidays, "holiday list file");
  cmd->add_option("--k", flags.k, "relevant days per prediction day");
  cmd->add_option("--grid", flags.grid, "grid preset `relevant`/`whole` or JSON file");
  auto* start = cmd->add_option("--test-start", flags.test_start, "first prediction day");
  auto* end = cmd->add_option("--test-end", flags.test_end, "last prediction day");
  if (needs_test_period) {
    start->required();
    end->required();
  }
  cmd->add_option("--seed", flags.seed, "deterministic seed");
  cmd->add_option("--out", flags.out, "output directory")->required();
  cmd->add_option("--workers", flags.workers, "worker threads (0 = all cores)");
  cmd->add_option("--fold-mode", flags.fold_mode, "cv folding: day|rows");
  cmd->add_option("--tolerance", flags.tolerance, "solver KKT tolerance");
  cmd->add_option("--max-iterations", flags.max_iterations, "solver iteration cap");
  cmd->add_option("--cache-mb", flags.cache_mb, "kernel row cache budget (MB)");
}

pipeline::RunConfig to_config(const CommonFlags& flags, pipeline::Mode mode) {
  pipeline::RunConfig config;
  config.data_path = flags.data;
  config.profiles_path = flags.profiles;
  config.forecast_dir = flags.forecasts;
  config.holidays_path = flags.holidays;
  config.mode = mode;
  config.k = flags.k;
  config.grid = flags.grid;
  config.test_start = parse_date_flag(flags.test_start, "--test-start");
  config.test_end = parse_date_flag(flags.test_end, "--test-end");
  config.seed = flags.seed;
  config.out_dir = flags.out;
  config.workers = flags.workers;
  if (flags.fold_mode == "rows") {
    config.fold_mode = tuning::FoldMode::rows;
  } else if (flags.fold_mode == "day") {
    config.fold_mode = tuning::FoldMode::day_blocked;
  } else {
    raise(Errc::invalid_config, "--fold-mode must be `day` or `rows`");
  }
  config.train.tolerance = flags.tolerance;
  config.train.max_iterations = flags.max_iterations;
  config.train.kernel_cache_mb = flags.cache_mb;
  return config;
}

void print_report_summary(const pipeline::PredictionReport& report) {
  int skipped = 0;
  for (const auto& day : report.days) skipped += day.skipped ? 1 : 0;
  std::printf("%s mode: %zu test days (%d skipped)\n",
              std::string(pipeline::to_string(report.mode)).c_str(), report.days.size(), skipped);
  auto line = [](const char* label, const pipeline::ClassAggregate& agg) {
    std::printf("  %-8s days=%-3d mean_r2=%.4f mean_rmse=%.2f train=%.1fs\n", label,
                agg.days_scored, agg.mean_r2, agg.mean_rmse, agg.train_ms / 1000.0);
  };
  line("working", report.working);
  line("weekend", report.weekend);
  line("overall", report.overall);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"day-ahead building heating-load forecasting"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "validate and clean a dataset CSV");
  std::string in_data, in_holidays, in_out;
  ingest->add_option("--data", in_data, "dataset CSV")->required();
  ingest->add_option("--holidays", in_holidays, "holiday list file");
  ingest->add_option("--out", in_out, "write the cleaned dataset CSV here");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
  std::string synth_out;
  int synth_days = 192;
  std::uint64_t synth_seed = 1;
  double synth_forecast_noise = 0.0;
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--days", synth_days, "corpus length in days");
  synth_cmd->add_option("--seed", synth_seed, "deterministic seed");
  synth_cmd->add_option("--forecast-noise", synth_forecast_noise,
                        "stddev of forecast temperature noise (degC)");

  // select
  auto* select = app.add_subcommand("select", "dry-run day ranking for one prediction day");
  std::string sel_data, sel_holidays, sel_forecasts, sel_date;
  int sel_k = 12;
  select->add_option("--data", sel_data, "dataset CSV")->required();
  select->add_option("--date", sel_date, "prediction date")->required();
  select->add_option("--k", sel_k, "days to choose");
  select->add_option("--holidays", sel_holidays, "holiday list file");
  select->add_option("--forecasts", sel_forecasts, "forecast directory");

  // run
  auto* run_cmd = app.add_subcommand("run", "run the forecasting pipeline over a test period");
  CommonFlags run_flags;
  std::string run_mode = "relevant";
  run_cmd->add_option("--mode", run_mode, "relevant|whole")->required();
  add_run_flags(run_cmd, run_flags, true);

  // sweep-k
  auto* sweep_cmd = app.add_subcommand("sweep-k", "performance curve over k");
  CommonFlags sweep_flags;
  int k_min = 5, k_max = 20;
  sweep_cmd->add_option("--k-min", k_min, "smallest k");
  sweep_cmd->add_option("--k-max", k_max, "largest k");
  add_run_flags(sweep_cmd, sweep_flags, true);

  // report
  auto* report_cmd = app.add_subcommand("report", "summaries over emitted run directories");
  std::string rep_relevant, rep_whole, rep_out;
  bool rep_compare = false;
  report_cmd->add_flag("--compare", rep_compare, "compare a relevant and a whole run");
  report_cmd->add_option("--relevant", rep_relevant, "relevant-mode run directory");
  report_cmd->add_option("--whole", rep_whole, "whole-mode run directory");
  report_cmd->add_option("--out", rep_out, "write the summary here (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage error
  }

  if (ingest->parsed()) {
    const auto holidays =
        in_holidays.empty() ? data::HolidaySet{} : data::load_holidays(in_holidays);
    const auto dataset = data::ingest_csv(in_data, {}, holidays);
    int complete = 0;
    for (const auto& day : dataset.days) complete += day.complete ? 1 : 0;
    std::printf("%zu days ingested (%d complete), %zu cleaning events\n", dataset.days.size(),
                complete, dataset.log.size());
    const std::size_t shown = std::min<std::size_t>(dataset.log.size(), 200);
    for (std::size_t i = 0; i < shown; ++i) {
      const auto& event = dataset.log[i];
      std::printf("  [%s] %s slot %d: %s\n", std::string(data::to_string(event.kind)).c_str(),
                  event.date.to_string().c_str(), event.slot, event.detail.c_str());
    }
    if (shown < dataset.log.size()) {
      std::printf("  ... %zu more events\n", dataset.log.size() - shown);
    }
    // correlation screen on daily aggregates per functioning class (per-slot
    // values are confounded by the occupancy schedule)
    for (const auto cls : {data::CoarseClass::working, data::CoarseClass::weekend}) {
      std::vector<double> day_temp, day_load;
      for (const auto& day : dataset.days) {
        if (!day.complete || data::coarse_class(day.type) != cls) continue;
        double t = 0.0, y = 0.0;
        for (int i = 0; i < kSlotsPerDay; ++i) {
          t += day.t_out[i];
          y += day.load[i];
        }
        day_temp.push_back(t / kSlotsPerDay);
        day_load.push_back(y / kSlotsPerDay);
      }
      if (day_temp.size() < 2) continue;
      try {
        std::printf("%s: daily t_out vs load correlation %.3f over %zu days\n",
                    std::string(data::to_string(cls)).c_str(),
                    tuning::pearson_r(day_temp, day_load), day_temp.size());
      } catch (const Error&) {
        std::printf("%s: daily t_out/load correlation undefined (constant series)\n",
                    std::string(data::to_string(cls)).c_str());
      }
    }
    if (!in_out.empty()) {
      data::write_csv(dataset, in_out);
      std::printf("cleaned dataset written to %s\n", in_out.c_str());
    }
    return 0;
  }

  if (synth_cmd->parsed()) {
    synth::Scenario scenario;
    scenario.forecast_noise_sigma_c = synth_forecast_noise;
    const auto paths = synth::generate_synthetic(synth_out, synth_days, synth_seed, scenario);
    std::printf("synthetic corpus written:\n  %s\n  %s\n  %s\n  %s\n", paths.data_csv.c_str(),
                paths.profiles_json.c_str(), paths.forecast_dir.c_str(),
                paths.holidays_txt.c_str());
    return 0;
  }

  if (select->parsed()) {
    const auto holidays =
        sel_holidays.empty() ? data::HolidaySet{} : data::load_holidays(sel_holidays);
    const auto dataset = data::ingest_csv(sel_data, {}, holidays);
    const Date date = parse_date_flag(sel_date, "--date");
    const auto type = data::classify_day(date, holidays);

    std::vector<double> forecast;
    if (!sel_forecasts.empty()) {
      forecast = pipeline::read_forecast(sel_forecasts, date);
    } else {
      const data::DayRecord* day = dataset.find(date);
      if (day == nullptr || !day->temps_complete()) {
        raise(Errc::missing_forecast, date.to_string() + ": no temperatures available");
      }
      forecast.assign(day->t_out.begin(), day->t_out.end());
    }

    const auto query = selector::build_query_window(date, dataset, forecast, holidays);
    const auto candidates = selector::candidate_windows(date, type, dataset);
    const auto selection = selector::select_relevant_days(query, candidates, sel_k);
    std::printf("%s (%s): %zu candidates, window length %zu\n", date.to_string().c_str(),
                std::string(data::to_string(type)).c_str(), selection.ranked.size(),
                query.temps.size());
    for (std::size_t i = 0; i < selection.ranked.size(); ++i) {
      const bool chosen = i < selection.chosen.size();
      std::printf("  %2zu. %s  distance %.4f%s\n", i + 1,
                  selection.ranked[i].first.to_string().c_str(), selection.ranked[i].second,
                  chosen ? "  *" : "");
    }
    if (selection.shortfall) std::printf("  (fewer than k=%d candidates available)\n", sel_k);
    return 0;
  }

  if (run_cmd->parsed()) {
    pipeline::Mode mode;
    if (run_mode == "relevant") {
      mode = pipeline::Mode::relevant;
    } else if (run_mode == "whole") {
      mode = pipeline::Mode::whole;
    } else {
      raise(Errc::invalid_config, "--mode must be `relevant` or `whole`");
    }
    const auto config = to_config(run_flags, mode);
    const auto report = pipeline::run(config);
    pipeline::emit_report(report, config.out_dir);
    print_report_summary(report);
    std::printf("report written to %s\n", config.out_dir.c_str());
    return 0;
  }

  if (sweep_cmd->parsed()) {
    const auto config = to_config(sweep_flags, pipeline::Mode::relevant);
    const auto sweep = pipeline::sweep_k(config, k_min, k_max);
    std::printf("k    mean_r2   mean_rmse  days\n");
    for (const auto& row : sweep.rows) {
      std::printf("%-4d %-9.4f %-10.2f %d\n", row.k, row.mean_r2, row.mean_rmse,
                  row.days_scored);
    }
    std::printf("best k by mean R2: %d\n", sweep.best_k);
    return 0;
  }

  if (report_cmd->parsed()) {
    if (!rep_compare || rep_relevant.empty() || rep_whole.empty()) {
      raise(Errc::invalid_config, "report needs --compare with --relevant and --whole");
    }
    const auto summary = pipeline::compare_summary_from_dirs(rep_relevant, rep_whole);
    if (rep_out.empty()) {
      std::fputs(summary.c_str(), stdout);
    } else {
      std::ofstream out(rep_out);
      if (!out) raise(Errc::io_failure, "cannot write " + rep_out);
      out << summary;
      std::printf("summary written to %s\n", rep_out.c_str());
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return is_data_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
