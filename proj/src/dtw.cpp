#include "heatcast/dtw.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace heatcast::dtw {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double local_cost(double a, double b) { return std::abs(a - b); }

// Full DP matrix plus backtracking; only used when the caller asks for the
// warping path.
DtwResult dtw_with_path(std::span<const double> a, std::span<const double> b,
                        std::optional<int> band) {
  const int p = static_cast<int>(a.size());
  const int q = static_cast<int>(b.size());
  std::vector<double> cost(static_cast<std::size_t>(p) * q, kInf);
  auto at = [&](int i, int j) -> double& { return cost[static_cast<std::size_t>(i) * q + j]; };

  for (int i = 0; i < p; ++i) {
    int j_lo = 0, j_hi = q - 1;
    if (band) {
      j_lo = std::max(0, i - *band);
      j_hi = std::min(q - 1, i + *band);
    }
    for (int j = j_lo; j <= j_hi; ++j) {
      double best = kInf;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        if (i > 0 && j > 0) best = std::min(best, at(i - 1, j - 1));
        if (i > 0) best = std::min(best, at(i - 1, j));
        if (j > 0) best = std::min(best, at(i, j - 1));
      }
      at(i, j) = best + local_cost(a[i], b[j]);
    }
  }

  WarpingPath path;
  int i = p - 1, j = q - 1;
  path.points.emplace_back(i + 1, j + 1);
  while (i > 0 || j > 0) {
    double diag = (i > 0 && j > 0) ? at(i - 1, j - 1) : kInf;
    double up = i > 0 ? at(i - 1, j) : kInf;
    double left = j > 0 ? at(i, j - 1) : kInf;
    // deterministic backtrack: diagonal preferred, then i-step, then j-step
    if (diag <= up && diag <= left) {
      --i;
      --j;
    } else if (up <= left) {
      --i;
    } else {
      --j;
    }
    path.points.emplace_back(i + 1, j + 1);
  }
  std::reverse(path.points.begin(), path.points.end());

  DtwResult result;
  result.distance = at(p - 1, q - 1);
  result.path = std::move(path);
  result.band = band;
  return result;
}

}  // namespace

DtwResult dtw_distance(std::span<const double> a, std::span<const double> b,
                       std::optional<int> band, bool want_path, bool normalize_by_path_length) {
  if (a.empty() || b.empty()) raise(Errc::empty_series, "dtw_distance: empty input series");
  if (band) {
    if (*band < 0) raise(Errc::band_infeasible, "negative band radius");
    const int diff = std::abs(static_cast<int>(a.size()) - static_cast<int>(b.size()));
    if (diff > *band) {
      raise(Errc::band_infeasible, "length difference " + std::to_string(diff) +
                                       " exceeds band radius " + std::to_string(*band));
    }
  }
  if (normalize_by_path_length) {
    DtwResult result = dtw_with_path(a, b, band);
    result.distance /= static_cast<double>(result.path->points.size());
    if (!want_path) result.path.reset();
    return result;
  }
  if (want_path) return dtw_with_path(a, b, band);

  // Two rolling rows.
  const int p = static_cast<int>(a.size());
  const int q = static_cast<int>(b.size());
  std::vector<double> prev(q, kInf), curr(q, kInf);
  for (int i = 0; i < p; ++i) {
    int j_lo = 0, j_hi = q - 1;
    if (band) {
      j_lo = std::max(0, i - *band);
      j_hi = std::min(q - 1, i + *band);
    }
    std::fill(curr.begin(), curr.end(), kInf);
    for (int j = j_lo; j <= j_hi; ++j) {
      double best = kInf;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
        if (i > 0) best = std::min(best, prev[j]);
        if (j > 0) best = std::min(best, curr[j - 1]);
      }
      curr[j] = best + local_cost(a[i], b[j]);
    }
    std::swap(prev, curr);
  }

  DtwResult result;
  result.distance = prev[q - 1];
  result.band = band;
  return result;
}

double lb_keogh(std::span<const double> query, std::span<const double> candidate,
                std::optional<int> band) {
  if (query.size() != candidate.size()) {
    raise(Errc::length_mismatch, "lb_keogh: series lengths " + std::to_string(query.size()) +
                                     " vs " + std::to_string(candidate.size()));
  }
  if (band && *band < 0) raise(Errc::band_infeasible, "negative band radius");
  const int n = static_cast<int>(query.size());
  const int r = band ? std::min(*band, n) : n;

  double lb = 0.0;
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - r);
    const int hi = std::min(n - 1, i + r);
    double upper = -kInf, lower = kInf;
    for (int j = lo; j <= hi; ++j) {
      upper = std::max(upper, query[j]);
      lower = std::min(lower, query[j]);
    }
    const double v = candidate[i];
    if (v > upper) {
      lb += v - upper;
    } else if (v < lower) {
      lb += lower - v;
    }
  }
  return lb;
}

}  // namespace heatcast::dtw
