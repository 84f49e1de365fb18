// Copyright 2026 The streamwatt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "streamwatt/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "streamwatt/kernels/kernels.hpp"
#include "streamwatt/numeric.hpp"

namespace streamwatt {
namespace {

void require_finite(std::span<const ParetoPoint> points) {
  for (const ParetoPoint& p : points) {
    if (!std::isfinite(p.mos) || !std::isfinite(p.watts)) {
      throw Error(ErrorCode::kValidation,
                  "session '" + p.session_id +
                      "' has a non-finite (mos, watts) coordinate");
    }
  }
}

/// Fenwick tree over watts ranks; counts points inside the sliding MOS
/// window so each neighborhood query is O(log n).
class CountTree {
 public:
  explicit CountTree(std::size_t n) : tree_(n + 1, 0) {}

  void add(std::size_t rank, int delta) {
    for (std::size_t i = rank + 1; i < tree_.size(); i += i & (~i + 1)) {
      tree_[i] += delta;
    }
  }

  // Number of inserted points with rank < end.
  long long prefix(std::size_t end) const {
    long long total = 0;
    for (std::size_t i = end; i > 0; i -= i & (~i + 1)) total += tree_[i];
    return total;
  }

 private:
  std::vector<long long> tree_;
};

/// kept[i] == true iff point i has >= k other points within the
/// [mos +- mos_eps] x [watts +- watts_eps] box (bounds inclusive).
std::vector<bool> neighborhood_mask(std::span<const ParetoPoint> points, int k,
                                    double mos_eps, double watts_eps) {
  const std::size_t n = points.size();
  std::vector<bool> kept(n, true);
  if (k <= 0 || n == 0) return kept;

  std::vector<std::size_t> by_mos(n);
  std::iota(by_mos.begin(), by_mos.end(), std::size_t{0});
  std::sort(by_mos.begin(), by_mos.end(), [&](std::size_t a, std::size_t b) {
    return points[a].mos < points[b].mos;
  });

  std::vector<double> watts_sorted(n);
  for (std::size_t i = 0; i < n; ++i) watts_sorted[i] = points[i].watts;
  std::sort(watts_sorted.begin(), watts_sorted.end());
  watts_sorted.erase(std::unique(watts_sorted.begin(), watts_sorted.end()),
                     watts_sorted.end());
  const auto rank_of = [&](double w) {
    return static_cast<std::size_t>(
        std::lower_bound(watts_sorted.begin(), watts_sorted.end(), w) -
        watts_sorted.begin());
  };

  CountTree tree(watts_sorted.size());
  std::size_t lo = 0;  // first in-window position in by_mos order
  std::size_t hi = 0;  // one past the last inserted position
  for (std::size_t pos = 0; pos < n; ++pos) {
    const ParetoPoint& p = points[by_mos[pos]];
    while (hi < n && points[by_mos[hi]].mos <= p.mos + mos_eps) {
      tree.add(rank_of(points[by_mos[hi]].watts), +1);
      ++hi;
    }
    while (points[by_mos[lo]].mos < p.mos - mos_eps) {
      tree.add(rank_of(points[by_mos[lo]].watts), -1);
      ++lo;
    }
    const std::size_t lo_rank = rank_of(p.watts - watts_eps);
    const auto hi_end = static_cast<std::size_t>(
        std::upper_bound(watts_sorted.begin(), watts_sorted.end(),
                         p.watts + watts_eps) -
        watts_sorted.begin());
    const long long neighbors =
        tree.prefix(hi_end) - tree.prefix(lo_rank) - 1;  // minus the point itself
    kept[by_mos[pos]] = neighbors >= k;
  }
  return kept;
}

double resolve_watts_eps(std::span<const ParetoPoint> points,
                         const OutlierRule& rule) {
  if (rule.watts_eps) return *rule.watts_eps;
  std::vector<double> watts(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) watts[i] = points[i].watts;
  const auto [lo, hi] = kernels::minmax(watts.data(), watts.size());
  return 0.02 * (hi - lo);
}

void validate_rule(const OutlierRule& rule, double watts_eps) {
  if (rule.k < 0) {
    throw Error(ErrorCode::kValidation, "outlier k must be >= 0");
  }
  if (!(rule.mos_eps >= 0.0) || !std::isfinite(rule.mos_eps)) {
    throw Error(ErrorCode::kValidation, "outlier mos_eps must be >= 0");
  }
  if (!(watts_eps >= 0.0) || !std::isfinite(watts_eps)) {
    throw Error(ErrorCode::kValidation, "outlier watts_eps must be >= 0");
  }
}

}  // namespace

bool dominates(const ParetoPoint& a, const ParetoPoint& b) noexcept {
  return a.mos >= b.mos && a.watts <= b.watts &&
         (a.mos > b.mos || a.watts < b.watts);
}

const ParetoPoint* ParetoFront::at_least(double target_mos) const noexcept {
  auto it = std::lower_bound(
      points_.begin(), points_.end(), target_mos,
      [](const ParetoPoint& p, double t) { return p.mos < t; });
  return it == points_.end() ? nullptr : &*it;
}

const ParetoPoint* ParetoFront::at_most(double target_mos) const noexcept {
  auto it = std::upper_bound(
      points_.begin(), points_.end(), target_mos,
      [](double t, const ParetoPoint& p) { return t < p.mos; });
  return it == points_.begin() ? nullptr : &*(it - 1);
}

ParetoFront pareto_front(GroupKey group, std::span<const ParetoPoint> points) {
  if (points.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                "cannot build a front for empty group " + group.label());
  }
  require_finite(points);

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const ParetoPoint& pa = points[a];
    const ParetoPoint& pb = points[b];
    if (pa.mos != pb.mos) return pa.mos > pb.mos;
    if (pa.watts != pb.watts) return pa.watts < pb.watts;
    return pa.session_id < pb.session_id;
  });

  std::vector<ParetoPoint> front;
  double best_watts = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < order.size()) {
    // One block per distinct MOS value; its cheapest point comes first and
    // watts ties within the block are already in ascending id order.
    std::size_t j = i;
    while (j < order.size() && points[order[j]].mos == points[order[i]].mos) {
      ++j;
    }
    const ParetoPoint& cheapest = points[order[i]];
    if (cheapest.watts < best_watts) {
      ParetoPoint rep = cheapest;
      rep.efficient = true;
      front.push_back(std::move(rep));
      best_watts = cheapest.watts;
    }
    i = j;
  }
  std::reverse(front.begin(), front.end());
  return ParetoFront(std::move(group), std::move(front));
}

std::vector<ParetoPoint> filter_outliers(std::span<const ParetoPoint> points,
                                         const OutlierRule& rule) {
  if (points.empty()) return {};
  require_finite(points);
  const double watts_eps = resolve_watts_eps(points, rule);
  validate_rule(rule, watts_eps);
  const std::vector<bool> kept =
      neighborhood_mask(points, rule.k, rule.mos_eps, watts_eps);
  std::vector<ParetoPoint> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (kept[i]) out.push_back(points[i]);
  }
  return out;
}

const ParetoPoint& min_power_at_mos(const ParetoFront& front, double target_mos,
                                    MosQuery mode) {
  const ParetoPoint* hit = mode == MosQuery::kAtLeast
                               ? front.at_least(target_mos)
                               : front.at_most(target_mos);
  if (hit == nullptr) {
    throw Error(ErrorCode::kNoFeasiblePoint,
                "group " + front.group().label() + " has no front point " +
                    (mode == MosQuery::kAtLeast ? "at or above" : "at or below") +
                    " mos " + format_double(target_mos));
  }
  return *hit;
}

GroupAnalysis analyze_group(GroupKey group, std::span<const ParetoPoint> points,
                            const OutlierRule& rule) {
  if (points.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                "cannot analyze empty group " + group.label());
  }
  require_finite(points);

  GroupAnalysis analysis;
  analysis.watts_eps_used = resolve_watts_eps(points, rule);
  validate_rule(rule, analysis.watts_eps_used);
  analysis.kept =
      neighborhood_mask(points, rule.k, rule.mos_eps, analysis.watts_eps_used);
  if (std::find(analysis.kept.begin(), analysis.kept.end(), true) ==
      analysis.kept.end()) {
    // Nothing survived; an empty group is worse than an unfiltered one.
    analysis.kept.assign(points.size(), true);
    analysis.outlier_fallback = true;
  }

  std::vector<ParetoPoint> surviving;
  surviving.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (analysis.kept[i]) surviving.push_back(points[i]);
  }
  analysis.front = pareto_front(std::move(group), surviving);

  // A point is flagged efficient iff it survived filtering and shares its
  // (mos, watts) pair with a front entry.
  std::vector<std::pair<double, double>> front_pairs;
  front_pairs.reserve(analysis.front.points().size());
  for (const ParetoPoint& p : analysis.front.points()) {
    front_pairs.emplace_back(p.mos, p.watts);
  }
  analysis.efficient.assign(points.size(), false);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!analysis.kept[i]) continue;
    analysis.efficient[i] = std::binary_search(
        front_pairs.begin(), front_pairs.end(),
        std::make_pair(points[i].mos, points[i].watts));
  }
  return analysis;
}

}  // namespace streamwatt
