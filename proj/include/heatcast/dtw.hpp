#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "heatcast/common.hpp"

namespace heatcast::dtw {

// Monotone, continuous alignment from (1,1) to (p,q); each step increments
// i, j, or both by one.
struct WarpingPath {
  std::vector<std::pair<int, int>> points;  // 1-based index pairs
};

struct DtwResult {
  double distance = 0.0;
  std::optional<WarpingPath> path;
  std::optional<int> band;  // Sakoe-Chiba radius actually used; nullopt = unbounded
};

// Local cost |a_i - b_j| accumulated along the optimal path, symmetric step
// pattern {(1,0),(0,1),(1,1)} with unit weights. Ranking compares raw sums;
// normalize_by_path_length divides by the optimal path's step count for
// callers comparing windows of different lengths.
DtwResult dtw_distance(std::span<const double> a, std::span<const double> b,
                       std::optional<int> band = std::nullopt, bool want_path = false,
                       bool normalize_by_path_length = false);

// Envelope lower bound on the banded DTW distance; requires equal lengths.
// With band = nullopt the envelope spans the whole query, which still lower
// bounds the unbounded distance.
double lb_keogh(std::span<const double> query, std::span<const double> candidate,
                std::optional<int> band = std::nullopt);

template <typename Id>
struct RankedCandidate {
  Id id;
  double distance;
};

namespace detail {

template <typename Id>
bool ranks_before(const RankedCandidate<Id>& a, const RankedCandidate<Id>& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.id > b.id;  // ties: most recent first
}

}  // namespace detail

// Exhaustive ranking, ascending by DTW distance; ties broken most-recent
// (greatest id) first.
template <typename Id>
std::vector<RankedCandidate<Id>> rank_candidates(
    std::span<const double> query,
    const std::vector<std::pair<Id, std::vector<double>>>& candidates,
    std::optional<int> band = std::nullopt) {
  std::vector<RankedCandidate<Id>> ranked;
  ranked.reserve(candidates.size());
  for (const auto& [id, series] : candidates) {
    ranked.push_back({id, dtw_distance(query, series, band).distance});
  }
  std::sort(ranked.begin(), ranked.end(), detail::ranks_before<Id>);
  return ranked;
}

// Top-k ranking with LB_Keogh pruning. Produces exactly the first k entries
// of rank_candidates: a candidate is skipped only when its lower bound is
// strictly above the current k-th best distance, so ties at the boundary are
// still resolved by the full computation.
template <typename Id>
std::vector<RankedCandidate<Id>> rank_top_k(
    std::span<const double> query,
    const std::vector<std::pair<Id, std::vector<double>>>& candidates, std::size_t k,
    std::optional<int> band = std::nullopt) {
  struct Entry {
    double lb;
    std::size_t index;
  };
  std::vector<Entry> order;
  order.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& series = candidates[i].second;
    const double lb =
        series.size() == query.size() ? lb_keogh(query, series, band) : 0.0;
    order.push_back({lb, i});
  }
  std::sort(order.begin(), order.end(), [&](const Entry& a, const Entry& b) {
    if (a.lb != b.lb) return a.lb < b.lb;
    return candidates[a.index].first > candidates[b.index].first;
  });

  std::vector<RankedCandidate<Id>> best;
  for (const Entry& e : order) {
    if (best.size() == k && e.lb > best.back().distance) break;  // lbs only grow from here
    const auto& [id, series] = candidates[e.index];
    RankedCandidate<Id> entry{id, dtw_distance(query, series, band).distance};
    auto pos = std::upper_bound(best.begin(), best.end(), entry, detail::ranks_before<Id>);
    best.insert(pos, entry);
    if (best.size() > k) best.pop_back();
  }
  return best;
}

}  // namespace heatcast::dtw
