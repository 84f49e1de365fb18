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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streamwatt/pareto.hpp"
#include "streamwatt/power_model.hpp"
#include "streamwatt/qoe_model.hpp"
#include "streamwatt/session.hpp"

namespace streamwatt {

/// A session with its two scores attached. `session` carries the raw
/// features and is required by the policies that re-estimate power under a
/// different profile (codec switch, device switch, joint); it is null when
/// the input was a pre-scored table.
struct ScoredSession {
  std::string id;
  DeviceClass device;
  Codec codec;
  double mos = 0.0;
  double watts = 0.0;
  double energy_joules = 0.0;
  const Session* session = nullptr;
};

using FrontMap = std::map<GroupKey, ParetoFront>;

/// Per-session before/after pair; `remapped` is false when the policy left
/// the session untouched (new == old in that case).
struct PerSessionDelta {
  std::string id;
  double old_mos = 0.0;
  double new_mos = 0.0;
  double old_watts = 0.0;
  double new_watts = 0.0;
  bool remapped = false;
};

struct SavingsBreakdownRow {
  std::string label;
  std::size_t n_sessions = 0;
  double baseline_mean_watts = 0.0;
  double optimized_mean_watts = 0.0;
  double absolute_saving_watts = 0.0;
  double relative_saving = 0.0;
};

/// Outcome of one policy over its affected sessions. Means are arithmetic
/// means over `per_session`. The headline ratio-of-means number equals
/// absolute / baseline (the fleet-energy view); the mean of per-session
/// ratios is reported separately because the two differ on skewed data.
struct SavingsReport {
  std::string policy;
  std::string configuration;
  std::size_t n_sessions = 0;
  std::size_t n_remapped = 0;
  std::size_t n_infeasible = 0;
  double baseline_mean_watts = 0.0;
  double optimized_mean_watts = 0.0;
  double absolute_saving_watts = 0.0;
  double relative_saving_ratio_of_means = 0.0;
  double relative_saving_mean_of_ratios = 0.0;
  double baseline_mean_mos = 0.0;
  double optimized_mean_mos = 0.0;
  std::vector<SavingsBreakdownRow> breakdown;
  std::vector<PerSessionDelta> per_session;
};

/// Verifies every report's saving identities — absolute = baseline −
/// optimized and absolute = ratio-of-means x baseline, both to 1e-9
/// relative — plus consistency with the per-session deltas when present,
/// and returns the reports unchanged. An empty list is an empty aggregate.
/// Throws IdentityViolation on the first mismatch.
std::vector<SavingsReport> savings_summary(std::vector<SavingsReport> reports);

/// Same-quality parameter optimization for one (device, codec) group: each
/// session moves to the cheapest front point with MOS at least its own when
/// that point is strictly cheaper; MOS never decreases.
SavingsReport optimize_params(std::span<const ScoredSession> group,
                              const ParetoFront& front);

/// Pooled variant across every group, with a per-group breakdown.
SavingsReport optimize_params(std::span<const ScoredSession> scored,
                              const FrontMap& fronts);

struct SwitchDirection {
  Codec from;
  Codec to;
};

/// Same-parameters codec switch. For every device with a direction, every
/// session of that device is costed under both the `from` and the `to`
/// profile of its device; the `from` side is the baseline. Requires raw
/// features. Breakdown by device.
SavingsReport switch_codec(std::span<const ScoredSession> scored,
                           const std::map<DeviceClass, SwitchDirection>& directions,
                           const ProfileSet& profiles,
                           const QoeModelConfig& qoe);

/// Same-parameters device switch for sessions on `from`: power is re-costed
/// on `to` with the session's own codec; MOS is unchanged (the quality model
/// has no device term). Breakdown by codec.
SavingsReport switch_device(std::span<const ScoredSession> scored,
                            const DeviceClass& from, const DeviceClass& to,
                            const ProfileSet& profiles);

/// Sufficiency cap: sessions above the cap drop to the best front point of
/// their group at or below it. Within a group the cap saturates at the
/// front's minimum MOS, so tightening the cap below that point neither
/// helps nor hurts; such sessions count as infeasible. A remap is skipped
/// when it would raise power. Breakdown by device.
SavingsReport apply_cap(std::span<const ScoredSession> scored,
                        const FrontMap& fronts, double cap);

struct CapSweepRow {
  double cap = 0.0;
  double relative_saving = 0.0;
  double absolute_saving_watts = 0.0;
  std::size_t n_remapped = 0;
  std::size_t n_infeasible = 0;
};

/// apply_cap over a strictly increasing cap grid.
std::vector<CapSweepRow> cap_sweep(std::span<const ScoredSession> scored,
                                   const FrontMap& fronts,
                                   std::span<const double> caps);

/// Joint optimum: every session is re-costed under the single profile with
/// the lowest dataset-mean power (ties broken by (device, codec) order),
/// then parameter-optimized against that profile's group front, then
/// optionally capped. Sessions that would end up costlier than they started
/// are reverted. Breakdown by original device.
SavingsReport joint_optimize(std::span<const ScoredSession> scored,
                             const ProfileSet& profiles,
                             const QoeModelConfig& qoe, const FrontMap& fronts,
                             std::optional<double> cap);

}  // namespace streamwatt
