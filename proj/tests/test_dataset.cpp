#include <doctest.h>

#include <cmath>
#include <fstream>
#include <functional>

#include "heatcast/dataset.hpp"
#include "heatcast/features.hpp"
#include "support/tmpdir.hpp"

using namespace heatcast;
using data::DayType;

namespace {

// Writes a CSV with `days` complete days; `edit` may rewrite any (date, slot)
// cell pair before emission. Fields are (t_out, load) as strings, empty =
// missing.
std::string write_corpus(const testsupport::TempDir& dir, const std::string& name, int days,
                         const std::function<void(const Date&, int, std::string&, std::string&)>&
                             edit = nullptr) {
  const std::string path = dir.file(name);
  std::ofstream out(path);
  out << "timestamp,t_out_c,load_kw\n";
  const Date start{2014, 3, 3};  // a Monday
  for (int d = 0; d < days; ++d) {
    const Date date = add_days(start, d);
    for (int slot = 1; slot <= kSlotsPerDay; ++slot) {
      std::string t = format_double(5.0 + 0.01 * slot + d);
      std::string y = format_double(100.0 + slot + 10.0 * d);
      if (edit) edit(date, slot, t, y);
      out << format_timestamp(date, slot) << ',' << t << ',' << y << '\n';
    }
  }
  return path;
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("three well-formed days ingest completely") {
    testsupport::TempDir dir("ingest_ok");
    const auto path = write_corpus(dir, "data.csv", 3);
    const auto dataset = data::ingest_csv(path);
    REQUIRE(dataset.days.size() == 3);
    for (const auto& day : dataset.days) {
      CHECK(day.complete);
      CHECK(day.temps_complete());
    }
    CHECK(dataset.days[0].type == DayType::working_monday);
    CHECK(dataset.days[1].type == DayType::working_other);
  }

  TEST_CASE("row at minute 07 aborts with UnparsableTimestamp") {
    testsupport::TempDir dir("ingest_badmin");
    const std::string path = dir.file("data.csv");
    {
      std::ofstream out(path);
      out << "timestamp,t_out_c,load_kw\n";
      out << "2014-03-03T00:00,5.0,100\n";
      out << "2014-03-03T00:07,5.0,100\n";
    }
    CHECK_THROWS_WITH_AS(data::ingest_csv(path), doctest::Contains("line 3"), Error);
    try {
      data::ingest_csv(path);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::unparsable_timestamp);
    }
  }

  TEST_CASE("wrong header aborts with MissingColumn") {
    testsupport::TempDir dir("ingest_hdr");
    const std::string path = dir.file("data.csv");
    {
      std::ofstream out(path);
      out << "time,t_out,load\n2014-03-03T00:00,5,100\n";
    }
    try {
      data::ingest_csv(path);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::missing_column);
    }
  }

  TEST_CASE("empty file aborts with EmptyFile") {
    testsupport::TempDir dir("ingest_empty");
    const std::string path = dir.file("data.csv");
    { std::ofstream out(path); }
    try {
      data::ingest_csv(path);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::empty_file);
    }
  }

  TEST_CASE("load gap beyond the limit excludes the day from the training pool") {
    testsupport::TempDir dir("ingest_gap");
    const auto path = write_corpus(dir, "data.csv", 2,
                                   [](const Date& date, int slot, std::string&, std::string& y) {
                                     if (date.day == 4 && slot >= 40 && slot < 44) y.clear();
                                   });
    const auto dataset = data::ingest_csv(path);
    REQUIRE(dataset.days.size() == 2);
    CHECK(dataset.days[0].complete);
    CHECK_FALSE(dataset.days[1].complete);  // 4 missing loads > limit 2
    CHECK(dataset.days[1].temps_complete());
    bool logged = false;
    for (const auto& event : dataset.log) {
      logged |= event.kind == data::CleanEvent::Kind::day_incomplete;
    }
    CHECK(logged);
  }

  TEST_CASE("single missing load sample interpolates to the midpoint") {
    std::vector<data::Sample> samples;
    const Date date{2014, 3, 3};
    for (int slot = 1; slot <= kSlotsPerDay; ++slot) {
      data::Sample s;
      s.ts = Timestamp{date, slot_minute(slot)};
      s.t_out = 5.0;
      s.load = slot == 50 ? std::optional<double>{} : std::optional<double>{slot == 49 ? 10.0 : (slot == 51 ? 12.0 : 7.0)};
      samples.push_back(s);
    }
    const auto dataset = data::clean_and_segment(std::move(samples));
    REQUIRE(dataset.days.size() == 1);
    CHECK(dataset.days[0].complete);
    CHECK(dataset.days[0].load[49] == doctest::Approx(11.0));  // between 10 and 12
  }

  TEST_CASE("fully present day passes through unchanged") {
    testsupport::TempDir dir("ingest_id");
    const auto path = write_corpus(dir, "data.csv", 1);
    const auto dataset = data::ingest_csv(path);
    REQUIRE(dataset.days.size() == 1);
    CHECK(dataset.days[0].complete);
    CHECK(dataset.days[0].load[0] == doctest::Approx(101.0));
    CHECK(dataset.log.empty());
  }

  TEST_CASE("out-of-bounds spike becomes missing and is interpolated") {
    data::Bounds bounds;
    bounds.load_max = 500.0;
    std::vector<data::Sample> samples;
    const Date date{2014, 3, 3};
    for (int slot = 1; slot <= kSlotsPerDay; ++slot) {
      data::Sample s;
      s.ts = Timestamp{date, slot_minute(slot)};
      s.t_out = 5.0;
      s.load = slot == 20 ? 5000.0 : 100.0;  // 10x the cap
      samples.push_back(s);
    }
    const auto dataset = data::clean_and_segment(std::move(samples), bounds);
    REQUIRE(dataset.days.size() == 1);
    CHECK(dataset.days[0].complete);
    CHECK(dataset.days[0].load[19] == doctest::Approx(100.0));
    bool flagged = false;
    for (const auto& event : dataset.log) {
      flagged |= event.kind == data::CleanEvent::Kind::out_of_bounds && event.slot == 20;
    }
    CHECK(flagged);
  }

  TEST_CASE("temperature gap beyond four samples drops the day") {
    testsupport::TempDir dir("ingest_tgap");
    const auto path = write_corpus(dir, "data.csv", 2,
                                   [](const Date& date, int slot, std::string& t, std::string&) {
                                     if (date.day == 3 && slot >= 10 && slot < 15) t.clear();
                                   });
    const auto dataset = data::ingest_csv(path);
    REQUIRE(dataset.days.size() == 1);  // first day dropped entirely
    CHECK(dataset.days[0].date == Date{2014, 3, 4});
  }

  TEST_CASE("classify_day follows the calendar and the holiday override") {
    CHECK(data::classify_day(Date{2014, 4, 15}) == DayType::working_other);  // Tuesday
    CHECK(data::classify_day(Date{2014, 4, 14}) == DayType::working_monday);
    CHECK(data::classify_day(Date{2014, 4, 19}) == DayType::saturday);
    CHECK(data::classify_day(Date{2014, 4, 20}) == DayType::sunday);

    data::HolidaySet holidays{Date{2014, 4, 15}};
    CHECK(data::classify_day(Date{2014, 4, 15}, holidays) == DayType::saturday);
    CHECK(data::coarse_class(data::classify_day(Date{2014, 4, 15}, holidays)) ==
          data::CoarseClass::weekend);
    CHECK(data::coarse_class(DayType::working_monday) == data::CoarseClass::working);
  }

  TEST_CASE("error classification for CLI exit codes") {
    CHECK(is_data_error(Errc::missing_column));
    CHECK(is_data_error(Errc::unparsable_timestamp));
    CHECK(is_data_error(Errc::io_failure));
    CHECK_FALSE(is_data_error(Errc::singular_input));
    CHECK_FALSE(is_data_error(Errc::scaler_mismatch));
  }

  TEST_CASE("holiday list file") {
    testsupport::TempDir dir("holidays");
    const std::string path = dir.file("holidays.txt");
    {
      std::ofstream out(path);
      out << "# fixture\n2014-05-01\n\n2014-05-08\n";
    }
    const auto holidays = data::load_holidays(path);
    CHECK(holidays.size() == 2);
    CHECK(holidays.contains(Date{2014, 5, 1}));
  }

  TEST_CASE("csv round trip reproduces the dataset") {
    testsupport::TempDir dir("roundtrip");
    const auto path = write_corpus(dir, "data.csv", 4,
                                   [](const Date& date, int slot, std::string&, std::string& y) {
                                     // one future day without loads
                                     if (date.day == 6 && slot >= 1) y.clear();
                                   });
    const auto dataset = data::ingest_csv(path);
    const std::string out_path = dir.file("out.csv");
    data::write_csv(dataset, out_path);
    const auto again = data::ingest_csv(out_path);

    REQUIRE(again.days.size() == dataset.days.size());
    for (std::size_t d = 0; d < dataset.days.size(); ++d) {
      CHECK(again.days[d].date == dataset.days[d].date);
      CHECK(again.days[d].type == dataset.days[d].type);
      CHECK(again.days[d].complete == dataset.days[d].complete);
      for (int i = 0; i < kSlotsPerDay; ++i) {
        const double t1 = dataset.days[d].t_out[i];
        const double t2 = again.days[d].t_out[i];
        CHECK(((std::isnan(t1) && std::isnan(t2)) || t1 == t2));
        const double y1 = dataset.days[d].load[i];
        const double y2 = again.days[d].load[i];
        CHECK(((std::isnan(y1) && std::isnan(y2)) || y1 == y2));
      }
    }
  }
}

TEST_SUITE("scaler") {
  features::FeatureMatrix two_col_matrix() {
    features::FeatureMatrix m(2);
    const double rows[2][2] = {{1.0, 5.0}, {3.0, 5.0}};
    m.push_row(std::span<const double>(rows[0], 2), 10.0, {Date{2014, 1, 1}, 1});
    m.push_row(std::span<const double>(rows[1], 2), 30.0, {Date{2014, 1, 1}, 2});
    return m;
  }

  TEST_CASE("column [1,3] scales to [-1,1] under the population convention") {
    const auto matrix = two_col_matrix();
    const auto scaler = data::Scaler::fit(matrix);
    CHECK(scaler.feature_mean(0) == doctest::Approx(2.0));
    CHECK(scaler.feature_std(0) == doctest::Approx(1.0));  // population std of {1,3}
    const auto scaled = scaler.apply(matrix);
    CHECK(scaled.row(0)[0] == doctest::Approx(-1.0));
    CHECK(scaled.row(1)[0] == doctest::Approx(1.0));
    CHECK(scaled.targets()[0] == doctest::Approx(-1.0));
    CHECK(scaled.targets()[1] == doctest::Approx(1.0));
  }

  TEST_CASE("constant column is centered only and flagged") {
    const auto matrix = two_col_matrix();
    const auto scaler = data::Scaler::fit(matrix);
    REQUIRE(scaler.degenerate_columns().size() == 1);
    CHECK(scaler.degenerate_columns()[0] == 1);
    const auto scaled = scaler.apply(matrix);
    CHECK(scaled.row(0)[1] == doctest::Approx(0.0));
    CHECK(scaled.row(1)[1] == doctest::Approx(0.0));
  }

  TEST_CASE("already standardized column is a fixed point") {
    features::FeatureMatrix m(1);
    const double a = -1.0, b = 1.0;
    m.push_row(std::span<const double>(&a, 1), std::nullopt, {});
    m.push_row(std::span<const double>(&b, 1), std::nullopt, {});
    const auto scaler = data::Scaler::fit(m);
    const auto scaled = scaler.apply(m);
    CHECK(scaled.row(0)[0] == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(scaled.row(1)[0] == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("apply then invert is the identity within 1e-9") {
    Rng rng(42);
    features::FeatureMatrix m(4);
    for (int i = 0; i < 50; ++i) {
      std::array<double, 4> row{};
      for (double& v : row) v = rng.uniform(-100.0, 100.0);
      m.push_row(row, rng.uniform(0.0, 500.0), {Date{2014, 1, 1}, i + 1});
    }
    const auto scaler = data::Scaler::fit(m);
    const auto scaled = scaler.apply(m);

    // post-scaling moments on the fitting set
    for (std::size_t j = 0; j < 4; ++j) {
      double mean = 0.0, ss = 0.0;
      for (std::size_t i = 0; i < scaled.rows(); ++i) mean += scaled.row(i)[j];
      mean /= static_cast<double>(scaled.rows());
      for (std::size_t i = 0; i < scaled.rows(); ++i) {
        const double d = scaled.row(i)[j] - mean;
        ss += d * d;
      }
      const double sd = std::sqrt(ss / static_cast<double>(scaled.rows()));
      CHECK(std::abs(mean) < 1e-9);
      CHECK(std::abs(sd - 1.0) < 1e-9);
    }

    const auto back = scaler.invert(scaled);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        CHECK(back.row(i)[j] == doctest::Approx(m.row(i)[j]).epsilon(1e-9));
      }
      CHECK(back.targets()[i] == doctest::Approx(m.targets()[i]).epsilon(1e-9));
    }
  }

  TEST_CASE("invert with a foreign scaler is rejected") {
    const auto matrix = two_col_matrix();
    const auto scaler = data::Scaler::fit(matrix);
    const auto scaled = scaler.apply(matrix);
    auto other = data::Scaler::from_stats({0.0, 0.0}, {2.0, 2.0}, 0.0, 1.0, true, {});
    try {
      other.invert(scaled);
      FAIL("expected ScalerMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::scaler_mismatch);
    }
  }
}
