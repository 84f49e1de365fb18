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

#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streamwatt/errors.hpp"

namespace streamwatt {

/// One session in (MOS, power) space. Higher MOS is better, lower watts is
/// better.
struct ParetoPoint {
  std::string session_id;
  double mos = 0.0;
  double watts = 0.0;
  bool efficient = false;
};

/// Analysis group: fronts are computed per (device, codec).
struct GroupKey {
  std::string device;
  std::string codec;

  auto operator<=>(const GroupKey&) const = default;
  std::string label() const { return "(" + device + ", " + codec + ")"; }
};

/// a dominates b iff a is at least as good in both metrics and strictly
/// better in one. Identical (mos, watts) pairs do not dominate each other.
bool dominates(const ParetoPoint& a, const ParetoPoint& b) noexcept;

/// The undominated points of a group, one representative per distinct
/// (mos, watts) pair (lowest session id wins), sorted so that both mos and
/// watts increase strictly along the list.
class ParetoFront {
 public:
  ParetoFront() = default;
  ParetoFront(GroupKey group, std::vector<ParetoPoint> points)
      : group_(std::move(group)), points_(std::move(points)) {}

  const GroupKey& group() const noexcept { return group_; }
  const std::vector<ParetoPoint>& points() const noexcept { return points_; }
  bool empty() const noexcept { return points_.empty(); }

  double min_mos() const { return points_.front().mos; }
  double max_mos() const { return points_.back().mos; }

  /// Cheapest front point with mos >= target, or nullptr.
  const ParetoPoint* at_least(double target_mos) const noexcept;
  /// Best-quality front point with mos <= target, or nullptr. By the
  /// staircase shape this is also the most expensive point under the cap.
  const ParetoPoint* at_most(double target_mos) const noexcept;

 private:
  GroupKey group_;
  std::vector<ParetoPoint> points_;
};

/// Builds the front by a descending-MOS sweep keeping the running power
/// minimum; equivalent to the quadratic dominance filter. Throws EmptyInput.
ParetoFront pareto_front(GroupKey group, std::span<const ParetoPoint> points);

/// Neighborhood-count outlier rule: a point is kept iff at least k other
/// points fall inside the axis-aligned box [mos +- mos_eps] x
/// [watts +- watts_eps]. With watts_eps unset, 2% of the group's power range
/// is used. k = 0 keeps everything.
struct OutlierRule {
  int k = 5;
  double mos_eps = 0.1;
  std::optional<double> watts_eps{};
};

std::vector<ParetoPoint> filter_outliers(std::span<const ParetoPoint> points,
                                         const OutlierRule& rule);

enum class MosQuery {
  kAtLeast,  // cheapest point at or above the target (same-QoE optimization)
  kAtMost,   // best allowed quality at or below the target (sufficiency cap)
};

/// Front query; throws NoFeasiblePoint when the target is outside the
/// front's MOS span in the requested direction.
const ParetoPoint& min_power_at_mos(const ParetoFront& front, double target_mos,
                                    MosQuery mode);

/// Outlier filtering plus front construction plus per-point flags for one
/// group. If the filter removes every point, it is retried with k = 0 and
/// the fallback is flagged.
struct GroupAnalysis {
  ParetoFront front;
  std::vector<bool> kept;       // survived outlier filtering
  std::vector<bool> efficient;  // kept and undominated within the kept set
  bool outlier_fallback = false;
  double watts_eps_used = 0.0;
};

GroupAnalysis analyze_group(GroupKey group, std::span<const ParetoPoint> points,
                            const OutlierRule& rule);

}  // namespace streamwatt
