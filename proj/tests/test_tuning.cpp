#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>

#include "heatcast/tuning.hpp"
#include "support/tmpdir.hpp"

using namespace heatcast;
using features::FeatureMatrix;

namespace {

// Day-aligned learnable matrix: targets are a smooth function of the features
// plus a small seeded wobble.
FeatureMatrix day_aligned_matrix(int days, std::uint64_t seed) {
  Rng rng(seed);
  FeatureMatrix m(3);
  for (int d = 0; d < days; ++d) {
    const Date date = add_days(Date{2014, 1, 6}, d);
    for (int slot = 1; slot <= kSlotsPerDay; ++slot) {
      const double a = std::sin(2.0 * 3.14159265358979 * slot / 96.0);
      const double b = 5.0 + 0.05 * slot + d;
      const double c = d % 3 == 0 ? 1.0 : 0.0;
      const std::array<double, 3> row{a, b, c};
      const double target = 40.0 * a + 3.0 * b - 10.0 * c + 0.5 * rng.normal();
      m.push_row(row, target, {date, slot});
    }
  }
  return m;
}

}  // namespace

TEST_SUITE("tuning") {
  TEST_CASE("kfold: 12 day blocks into 5 folds gives day counts 3,3,2,2,2") {
    const auto folds = tuning::kfold_split(1152, 5, 9, 96);
    REQUIRE(folds.size() == 5);
    std::multiset<std::size_t> day_counts;
    for (const auto& fold : folds) {
      CHECK(fold.size() % 96 == 0);
      day_counts.insert(fold.size() / 96);
    }
    CHECK(day_counts == std::multiset<std::size_t>{2, 2, 2, 3, 3});
  }

  TEST_CASE("kfold: plain rows split") {
    const auto folds = tuning::kfold_split(10, 5, 1);
    REQUIRE(folds.size() == 5);
    for (const auto& fold : folds) CHECK(fold.size() == 2);
  }

  TEST_CASE("kfold: partition and determinism") {
    const auto a = tuning::kfold_split(97, 4, 123);
    const auto b = tuning::kfold_split(97, 4, 123);
    CHECK(a == b);

    std::set<std::size_t> seen;
    std::size_t smallest = 97, largest = 0;
    for (const auto& fold : a) {
      smallest = std::min(smallest, fold.size());
      largest = std::max(largest, fold.size());
      for (std::size_t idx : fold) {
        CHECK(seen.insert(idx).second);  // disjoint
      }
    }
    CHECK(seen.size() == 97);
    CHECK(largest - smallest <= 1);

    const auto c = tuning::kfold_split(97, 4, 124);
    CHECK(a != c);
  }

  TEST_CASE("kfold: too few samples") {
    try {
      tuning::kfold_split(3, 5, 1);
      FAIL("expected TooFewSamples");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::too_few_samples);
    }
  }

  TEST_CASE("r2 hand checks") {
    const std::vector<double> actual{1.0, 2.0, 3.0};
    const std::vector<double> predicted{1.0, 2.0, 4.0};
    CHECK(std::abs(tuning::r2(actual, predicted) - 0.5) <= 1e-12);
    CHECK(std::abs(tuning::r2(actual, actual) - 1.0) <= 1e-12);

    const std::vector<double> mean_pred(3, 2.0);
    CHECK(std::abs(tuning::r2(actual, mean_pred)) <= 1e-12);

    const std::vector<double> constant(3, 5.0);
    try {
      tuning::r2(constant, predicted);
      FAIL("expected DegenerateActual");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::degenerate_actual);
    }
  }

  TEST_CASE("rmse hand checks") {
    const std::vector<double> actual{1.0, 2.0, 3.0};
    const std::vector<double> predicted{1.0, 2.0, 4.0};
    CHECK(std::abs(tuning::rmse(actual, predicted) - std::sqrt(1.0 / 3.0)) <= 1e-12);
    CHECK(tuning::rmse(actual, actual) == 0.0);

    std::vector<double> offset(actual);
    for (double& v : offset) v += 2.5;
    CHECK(tuning::rmse(actual, offset) == doctest::Approx(2.5).epsilon(1e-12));

    const std::vector<double> short_series{1.0};
    try {
      tuning::rmse(actual, short_series);
      FAIL("expected LengthMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::length_mismatch);
    }
  }

  TEST_CASE("pearson correlation") {
    std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    std::vector<double> y;
    for (double v : x) y.push_back(2.0 * v + 1.0);
    CHECK(tuning::pearson_r(x, y) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> neg;
    for (double v : x) neg.push_back(-v);
    CHECK(tuning::pearson_r(x, neg) == doctest::Approx(-1.0).epsilon(1e-12));

    Rng rng(404);
    std::vector<double> a(10000), b(10000);
    for (double& v : a) v = rng.normal();
    for (double& v : b) v = rng.normal();
    CHECK(std::abs(tuning::pearson_r(a, b)) < 0.05);

    const std::vector<double> constant(4, 1.0);
    try {
      tuning::pearson_r(constant, x);
      FAIL("expected DegenerateSeries");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::degenerate_series);
    }
  }

  TEST_CASE("grid presets match the declared search spaces") {
    const auto relevant = tuning::GridSpec::relevant_preset();
    CHECK(relevant.c_values.size() == 11);
    CHECK(relevant.gamma_values.size() == 31);
    CHECK(relevant.epsilon_values.size() == 5);
    CHECK(relevant.size() == 1705);
    CHECK(relevant.c_values.front() == doctest::Approx(std::ldexp(1.0, -5)));
    CHECK(relevant.c_values.back() == doctest::Approx(32.0));
    CHECK(relevant.gamma_values.front() == doctest::Approx(std::ldexp(1.0, -15)));
    CHECK(relevant.gamma_values.back() == doctest::Approx(32768.0));

    const auto whole = tuning::GridSpec::whole_preset();
    CHECK(whole.c_values.size() == 21);
    CHECK(whole.c_values.back() == doctest::Approx(32768.0));
    CHECK(whole.size() == 3255);

    // row-major C -> gamma -> epsilon
    const auto first = relevant.cell(0);
    CHECK(first.c == doctest::Approx(std::ldexp(1.0, -5)));
    CHECK(first.gamma == doctest::Approx(std::ldexp(1.0, -15)));
    CHECK(first.epsilon == doctest::Approx(0.001));
    const auto second = relevant.cell(1);
    CHECK(second.c == first.c);
    CHECK(second.gamma == first.gamma);
    CHECK(second.epsilon == doctest::Approx(0.01));
    const auto last = relevant.cell(relevant.size() - 1);
    CHECK(last.c == doctest::Approx(32.0));
    CHECK(last.gamma == doctest::Approx(32768.0));
    CHECK(last.epsilon == doctest::Approx(0.5));
  }

  TEST_CASE("grid override file") {
    testsupport::TempDir dir("grid");
    const std::string path = dir.file("grid.json");
    {
      std::ofstream out(path);
      out << R"({"c": [1.0, 2.0], "gamma": [0.5], "epsilon": [0.1, 0.2]})";
    }
    const auto grid = tuning::GridSpec::load(path);
    CHECK(grid.size() == 4);
    CHECK(tuning::GridSpec::named_or_file(path).size() == 4);
    CHECK(tuning::GridSpec::named_or_file("relevant").size() == 1705);
    CHECK(tuning::GridSpec::named_or_file("whole").size() == 3255);

    const std::string bad = dir.file("bad.json");
    {
      std::ofstream out(bad);
      out << R"({"c": [1.0]})";
    }
    CHECK_THROWS_AS(tuning::GridSpec::load(bad), Error);
  }

  TEST_CASE("better_cell tie chain") {
    auto cell = [](double rmse, double r2, double c, double gamma, double eps) {
      tuning::CvResult result;
      result.mean_rmse = rmse;
      result.mean_r2 = r2;
      result.params = {c, eps, gamma};
      return result;
    };
    CHECK(tuning::better_cell(cell(1.0, 0.5, 8, 8, 0.1), cell(2.0, 0.9, 1, 1, 0.5)));
    CHECK(tuning::better_cell(cell(1.0, 0.9, 8, 8, 0.1), cell(1.0, 0.5, 1, 1, 0.5)));
    CHECK(tuning::better_cell(cell(1.0, 0.9, 1, 8, 0.1), cell(1.0, 0.9, 2, 1, 0.5)));
    CHECK(tuning::better_cell(cell(1.0, 0.9, 1, 1, 0.1), cell(1.0, 0.9, 1, 2, 0.5)));
    CHECK(tuning::better_cell(cell(1.0, 0.9, 1, 1, 0.5), cell(1.0, 0.9, 1, 1, 0.1)));
    CHECK_FALSE(tuning::better_cell(cell(1.0, 0.9, 1, 1, 0.1), cell(1.0, 0.9, 1, 1, 0.1)));
  }

  TEST_CASE("grid search returns the cell with minimum mean RMSE") {
    const auto matrix = day_aligned_matrix(6, 11);
    tuning::GridSpec grid{{0.5, 4.0}, {0.125, 1.0}, {0.01, 0.2}};
    tuning::GridSearchOptions options;
    options.folds = 5;
    options.seed = 3;
    options.workers = 2;
    options.train.tolerance = 1e-4;
    const auto result = tuning::grid_search(matrix, grid, options);
    REQUIRE(result.cells.size() == 8);
    for (const auto& cell : result.cells) {
      CHECK(result.cells[result.best_index].mean_rmse <= cell.mean_rmse);
      CHECK(cell.fold_rmse.size() == 5);
      const double mean = (cell.fold_rmse[0] + cell.fold_rmse[1] + cell.fold_rmse[2] +
                           cell.fold_rmse[3] + cell.fold_rmse[4]) /
                          5.0;
      CHECK(cell.mean_rmse == doctest::Approx(mean).epsilon(1e-12));
    }
    CHECK(result.best == result.cells[result.best_index].params);
  }

  TEST_CASE("grid of one cell returns that cell") {
    const auto matrix = day_aligned_matrix(5, 13);
    tuning::GridSpec grid{{2.0}, {0.5}, {0.1}};
    tuning::GridSearchOptions options;
    options.seed = 5;
    const auto result = tuning::grid_search(matrix, grid, options);
    REQUIRE(result.cells.size() == 1);
    CHECK(result.best_index == 0);
    CHECK(result.best.c == doctest::Approx(2.0));
  }

  TEST_CASE("fold scalers are fit without the held-out rows") {
    // Replicates one fold of the CV by hand and requires the exact same
    // numbers as grid_search; a scaler leaking held-out rows would change
    // every value downstream.
    const auto matrix = day_aligned_matrix(5, 17);
    tuning::GridSpec grid{{1.0}, {0.5}, {0.05}};
    tuning::GridSearchOptions options;
    options.folds = 5;
    options.seed = 29;
    options.train.tolerance = 1e-6;
    const auto result = tuning::grid_search(matrix, grid, options);

    const auto folds = tuning::kfold_split(matrix.rows(), 5, options.seed, 96);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::vector<bool> held(matrix.rows(), false);
      for (std::size_t idx : folds[f]) held[idx] = true;
      std::vector<std::size_t> train_idx;
      for (std::size_t i = 0; i < matrix.rows(); ++i) {
        if (!held[i]) train_idx.push_back(i);
      }
      const auto train = matrix.select_rows(train_idx);
      const auto val = matrix.select_rows(folds[f]);
      const auto scaler = data::Scaler::fit(train);

      // moments computed from training rows only
      for (std::size_t j = 0; j < matrix.cols(); ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < train.rows(); ++i) mean += train.row(i)[j];
        mean /= static_cast<double>(train.rows());
        CHECK(scaler.feature_mean(j) == doctest::Approx(mean).epsilon(1e-12));
      }

      svr::TrainOptions train_opts = options.train;
      const auto model = svr::train_svr(scaler.apply(train), {1.0, 0.05, 0.5}, train_opts);
      const auto predicted = svr::predict(model, scaler.apply(val));
      const double manual_rmse = tuning::rmse(val.targets(), predicted);
      CHECK(result.cells[0].fold_rmse[f] == doctest::Approx(manual_rmse).epsilon(1e-12));
    }
  }

  TEST_CASE("cells that hit the iteration cap are retained and flagged") {
    const auto matrix = day_aligned_matrix(5, 23);
    tuning::GridSpec grid{{8.0}, {0.5}, {0.001}};
    tuning::GridSearchOptions options;
    options.seed = 7;
    options.train.max_iterations = 5;  // force the cap
    const auto result = tuning::grid_search(matrix, grid, options);
    REQUIRE(result.cells.size() == 1);
    CHECK(result.cells[0].iteration_cap_hit);
    CHECK(std::isfinite(result.cells[0].mean_rmse));
  }

  TEST_CASE("grid search rejects scaled input and empty grids") {
    auto matrix = day_aligned_matrix(5, 19);
    const auto scaler = data::Scaler::fit(matrix);
    const auto scaled = scaler.apply(matrix);
    CHECK_THROWS_AS(tuning::grid_search(scaled, tuning::GridSpec{{1}, {1}, {0.1}}, {}), Error);
    CHECK_THROWS_AS(tuning::grid_search(matrix, tuning::GridSpec{}, {}), Error);
  }
}
