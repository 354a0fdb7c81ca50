#include <doctest.h>

#include <cmath>
#include <vector>

#include "heatcast/common.hpp"
#include "heatcast/dtw.hpp"
#include "support/brute_dtw.hpp"

using namespace heatcast;

namespace {

std::vector<double> random_series(Rng& rng, std::size_t max_len) {
  std::vector<double> s(1 + rng.index(max_len));
  for (double& v : s) v = rng.uniform(-5.0, 5.0);
  return s;
}

}  // namespace

TEST_SUITE("dtw") {
  TEST_CASE("identical series have distance zero and a diagonal path") {
    const std::vector<double> a{1.0, 4.0, 2.0, 8.0};
    const auto result = dtw::dtw_distance(a, a, std::nullopt, true);
    CHECK(result.distance == doctest::Approx(0.0));
    REQUIRE(result.path.has_value());
    REQUIRE(result.path->points.size() == 4);
    for (int i = 0; i < 4; ++i) {
      CHECK(result.path->points[i] == std::pair<int, int>{i + 1, i + 1});
    }
  }

  TEST_CASE("a stretched copy still matches at zero cost") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    const std::vector<double> b{1.0, 2.0, 2.0, 3.0};
    CHECK(dtw::dtw_distance(a, b).distance == doctest::Approx(0.0));
  }

  TEST_CASE("constant offset pair matches the enumerated optimum") {
    const std::vector<double> a{0.0, 0.0};
    const std::vector<double> b{1.0, 1.0};
    CHECK(dtw::dtw_distance(a, b).distance == doctest::Approx(2.0));
    CHECK(testsupport::brute_force_dtw(a, b) == doctest::Approx(2.0));
  }

  TEST_CASE("small exhaustive oracle: lengths up to 4 over {0,1,2}") {
    // the full <=6 sweep runs in the acceptance suite
    std::vector<std::vector<double>> all;
    for (int len = 1; len <= 4; ++len) {
      const int combos = static_cast<int>(std::pow(3, len));
      for (int code = 0; code < combos; ++code) {
        std::vector<double> s(len);
        int v = code;
        for (int i = 0; i < len; ++i) {
          s[i] = v % 3;
          v /= 3;
        }
        all.push_back(std::move(s));
      }
    }
    for (std::size_t i = 0; i < all.size(); i += 7) {
      for (std::size_t j = i; j < all.size(); j += 5) {
        const double fast = dtw::dtw_distance(all[i], all[j]).distance;
        const double brute = testsupport::brute_force_dtw(all[i], all[j]);
        REQUIRE(fast == doctest::Approx(brute).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("metric-style properties on random pairs") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      const auto a = random_series(rng, 32);
      const auto b = random_series(rng, 32);
      const double ab = dtw::dtw_distance(a, b).distance;
      const double ba = dtw::dtw_distance(b, a).distance;
      CHECK(ab >= 0.0);
      CHECK(std::abs(ab - ba) < 1e-9);
      CHECK(dtw::dtw_distance(a, a).distance == doctest::Approx(0.0));
      if (a.size() == b.size()) {
        double diag = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) diag += std::abs(a[i] - b[i]);
        CHECK(ab <= diag + 1e-9);
      }
    }
  }

  TEST_CASE("path accumulates exactly the reported distance") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = random_series(rng, 20);
      const auto b = random_series(rng, 20);
      const auto result = dtw::dtw_distance(a, b, std::nullopt, true);
      REQUIRE(result.path.has_value());
      const auto& pts = result.path->points;
      CHECK(pts.front() == std::pair<int, int>{1, 1});
      CHECK(pts.back() ==
            std::pair<int, int>{static_cast<int>(a.size()), static_cast<int>(b.size())});
      double total = 0.0;
      for (std::size_t s = 0; s < pts.size(); ++s) {
        total += std::abs(a[pts[s].first - 1] - b[pts[s].second - 1]);
        if (s > 0) {
          const int di = pts[s].first - pts[s - 1].first;
          const int dj = pts[s].second - pts[s - 1].second;
          CHECK(di >= 0);
          CHECK(dj >= 0);
          CHECK(di + dj >= 1);
          CHECK(di <= 1);
          CHECK(dj <= 1);
        }
      }
      CHECK(std::abs(total - result.distance) < 1e-9);
    }
  }

  TEST_CASE("band preconditions") {
    const std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
    const std::vector<double> b{1.0, 2.0};
    try {
      dtw::dtw_distance(a, b, 1);
      FAIL("expected BandInfeasible");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::band_infeasible);
    }
    CHECK_THROWS_AS(dtw::dtw_distance({}, b), Error);
  }

  TEST_CASE("path-length normalization divides by the optimal path's steps") {
    const std::vector<double> a{0.0, 0.0};
    const std::vector<double> b{1.0, 1.0};
    const auto raw = dtw::dtw_distance(a, b);
    const auto normalized = dtw::dtw_distance(a, b, std::nullopt, true, true);
    REQUIRE(normalized.path.has_value());
    CHECK(normalized.distance ==
          doctest::Approx(raw.distance / normalized.path->points.size()));
    // default is raw sums
    CHECK(raw.distance == doctest::Approx(2.0));
  }

  TEST_CASE("banded distance dominates the unbounded one") {
    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> a(16), b(16);
      for (double& v : a) v = rng.uniform(-3.0, 3.0);
      for (double& v : b) v = rng.uniform(-3.0, 3.0);
      const double full = dtw::dtw_distance(a, b).distance;
      const double banded = dtw::dtw_distance(a, b, 2).distance;
      CHECK(banded >= full - 1e-12);
    }
  }

  TEST_CASE("lb_keogh basics") {
    const std::vector<double> a{1.0, 2.0, 3.0, 2.0};
    CHECK(dtw::lb_keogh(a, a, 1) == doctest::Approx(0.0));

    const std::vector<double> inside{1.5, 2.0, 2.5, 2.0};
    CHECK(dtw::lb_keogh(a, inside, 1) == doctest::Approx(0.0));  // within the envelope

    const std::vector<double> shorter{1.0, 2.0};
    try {
      dtw::lb_keogh(a, shorter, 1);
      FAIL("expected LengthMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::length_mismatch);
    }
  }

  TEST_CASE("lb_keogh lower-bounds dtw for matching bands") {
    Rng rng(17);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t len = 2 + rng.index(31);
      std::vector<double> a(len), b(len);
      for (double& v : a) v = rng.uniform(-4.0, 4.0);
      for (double& v : b) v = rng.uniform(-4.0, 4.0);

      const double lb_full = dtw::lb_keogh(a, b);
      CHECK(lb_full <= dtw::dtw_distance(a, b).distance + 1e-9);

      const int band = static_cast<int>(rng.index(len));
      const double lb = dtw::lb_keogh(a, b, band);
      CHECK(lb <= dtw::dtw_distance(a, b, band).distance + 1e-9);
    }
  }

  TEST_CASE("ranking puts an exact match first and breaks ties by recency") {
    const std::vector<double> query{1.0, 2.0, 3.0};
    std::vector<std::pair<int, std::vector<double>>> candidates{
        {10, {5.0, 5.0, 5.0}},
        {20, {1.0, 2.0, 3.0}},
        {30, {3.0, 2.0, 1.0}},
    };
    const auto ranked = dtw::rank_candidates<int>(query, candidates);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].id == 20);
    CHECK(ranked[0].distance == doctest::Approx(0.0));

    // two equidistant candidates: the more recent id wins
    std::vector<std::pair<int, std::vector<double>>> tied{
        {1, {0.0, 0.0}},
        {2, {0.0, 0.0}},
    };
    const std::vector<double> tie_query{1.0, 1.0};
    const auto tie_ranked = dtw::rank_candidates<int>(tie_query, tied);
    CHECK(tie_ranked[0].id == 2);
    CHECK(tie_ranked[1].id == 1);
  }

  TEST_CASE("pruned top-k ranking equals the exhaustive prefix") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t len = 24;
      std::vector<double> query(len);
      for (double& v : query) v = rng.uniform(-2.0, 2.0);
      std::vector<std::pair<int, std::vector<double>>> candidates;
      for (int id = 0; id < 50; ++id) {
        std::vector<double> s(len);
        for (double& v : s) v = rng.uniform(-2.0, 2.0);
        candidates.emplace_back(id, std::move(s));
      }
      // a few duplicates force distance ties
      candidates[10].second = candidates[4].second;
      candidates[47].second = query;
      candidates[31].second = query;

      const auto exhaustive = dtw::rank_candidates<int>(query, candidates);
      for (std::size_t k : {1ul, 5ul, 12ul, 50ul}) {
        const auto pruned = dtw::rank_top_k<int>(query, candidates, k);
        REQUIRE(pruned.size() == std::min(k, candidates.size()));
        for (std::size_t i = 0; i < pruned.size(); ++i) {
          CHECK(pruned[i].id == exhaustive[i].id);
          CHECK(pruned[i].distance == doctest::Approx(exhaustive[i].distance));
        }
      }
    }
  }
}
