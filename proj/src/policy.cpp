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

#include "streamwatt/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "streamwatt/numeric.hpp"

namespace streamwatt {
namespace {

constexpr double kIdentityTolerance = 1e-9;

const ParetoFront& require_front(const FrontMap& fronts, const GroupKey& key) {
  auto it = fronts.find(key);
  if (it == fronts.end()) {
    throw Error(ErrorCode::kNoFeasiblePoint,
                "no front available for group " + key.label());
  }
  return it->second;
}

const Session& require_features(const ScoredSession& s,
                                const std::string& policy) {
  if (s.session == nullptr) {
    throw Error(ErrorCode::kValidation,
                "policy '" + policy + "' needs raw session features, but '" +
                    s.id + "' comes from a pre-scored table");
  }
  return *s.session;
}

struct Means {
  double watts_base = 0.0;
  double watts_opt = 0.0;
  double mos_base = 0.0;
  double mos_opt = 0.0;
  double mean_of_ratios = 0.0;
};

Means compute_means(std::span<const PerSessionDelta> deltas) {
  std::vector<double> wb, wo, mb, mo, ratios;
  wb.reserve(deltas.size());
  wo.reserve(deltas.size());
  mb.reserve(deltas.size());
  mo.reserve(deltas.size());
  ratios.reserve(deltas.size());
  for (const PerSessionDelta& d : deltas) {
    wb.push_back(d.old_watts);
    wo.push_back(d.new_watts);
    mb.push_back(d.old_mos);
    mo.push_back(d.new_mos);
    ratios.push_back((d.old_watts - d.new_watts) / d.old_watts);
  }
  Means m;
  m.watts_base = mean(wb);
  m.watts_opt = mean(wo);
  m.mos_base = mean(mb);
  m.mos_opt = mean(mo);
  m.mean_of_ratios = mean(ratios);
  return m;
}

/// Assembles the aggregate fields from per-session deltas. `labels` runs
/// parallel to `deltas` and names each session's breakdown bucket.
SavingsReport finalize_report(std::string policy, std::string configuration,
                              std::vector<PerSessionDelta> deltas,
                              std::span<const std::string> labels,
                              std::size_t n_infeasible) {
  if (deltas.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                "policy '" + policy + "' affected no sessions");
  }
  SavingsReport report;
  report.policy = std::move(policy);
  report.configuration = std::move(configuration);
  report.n_sessions = deltas.size();
  report.n_infeasible = n_infeasible;
  report.n_remapped = static_cast<std::size_t>(
      std::count_if(deltas.begin(), deltas.end(),
                    [](const PerSessionDelta& d) { return d.remapped; }));

  const Means m = compute_means(deltas);
  report.baseline_mean_watts = m.watts_base;
  report.optimized_mean_watts = m.watts_opt;
  report.absolute_saving_watts = m.watts_base - m.watts_opt;
  report.relative_saving_ratio_of_means =
      report.absolute_saving_watts / m.watts_base;
  report.relative_saving_mean_of_ratios = m.mean_of_ratios;
  report.baseline_mean_mos = m.mos_base;
  report.optimized_mean_mos = m.mos_opt;

  std::map<std::string, std::vector<PerSessionDelta>> buckets;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    buckets[labels[i]].push_back(deltas[i]);
  }
  for (const auto& [label, bucket] : buckets) {
    const Means bm = compute_means(bucket);
    SavingsBreakdownRow row;
    row.label = label;
    row.n_sessions = bucket.size();
    row.baseline_mean_watts = bm.watts_base;
    row.optimized_mean_watts = bm.watts_opt;
    row.absolute_saving_watts = bm.watts_base - bm.watts_opt;
    row.relative_saving = row.absolute_saving_watts / bm.watts_base;
    report.breakdown.push_back(std::move(row));
  }

  report.per_session = std::move(deltas);
  return report;
}

void check_identity(const std::string& what, double stored, double recomputed) {
  const double scale = std::max({std::fabs(stored), std::fabs(recomputed), 1.0});
  if (std::fabs(stored - recomputed) > kIdentityTolerance * scale) {
    throw Error(ErrorCode::kIdentityViolation,
                what + " is inconsistent with the per-session deltas: stored " +
                    format_double(stored) + ", recomputed " +
                    format_double(recomputed));
  }
}

/// Cap one session against a front: saturated effective cap, at-most query,
/// never-pessimize guard. Returns true when the raw cap was infeasible for
/// this group.
bool cap_session(PerSessionDelta& d, const ParetoFront& front, double cap) {
  const bool infeasible = cap < front.min_mos();
  const double effective = std::max(cap, front.min_mos());
  if (d.new_mos <= effective) return infeasible;
  const ParetoPoint* pt = front.at_most(effective);
  if (pt != nullptr && pt->watts <= d.new_watts) {
    d.new_mos = pt->mos;
    d.new_watts = pt->watts;
    d.remapped = true;
  }
  return infeasible;
}

void verify_report(const SavingsReport& report) {
  check_identity("absolute_saving_watts", report.absolute_saving_watts,
                 report.baseline_mean_watts - report.optimized_mean_watts);
  check_identity(
      "relative_saving_ratio_of_means x baseline_mean_watts",
      report.absolute_saving_watts,
      report.relative_saving_ratio_of_means * report.baseline_mean_watts);
  if (report.per_session.empty()) return;
  if (report.n_sessions != report.per_session.size()) {
    throw Error(ErrorCode::kIdentityViolation,
                "n_sessions does not match the per-session delta count");
  }
  const Means m = compute_means(report.per_session);
  check_identity("baseline_mean_watts", report.baseline_mean_watts,
                 m.watts_base);
  check_identity("optimized_mean_watts", report.optimized_mean_watts,
                 m.watts_opt);
}

}  // namespace

std::vector<SavingsReport> savings_summary(std::vector<SavingsReport> reports) {
  for (const SavingsReport& report : reports) verify_report(report);
  return reports;
}

SavingsReport optimize_params(std::span<const ScoredSession> group,
                              const ParetoFront& front) {
  std::vector<PerSessionDelta> deltas;
  std::vector<std::string> labels;
  deltas.reserve(group.size());
  labels.reserve(group.size());
  for (const ScoredSession& s : group) {
    const GroupKey key{s.device.tag, s.codec.tag};
    if (key != front.group()) {
      throw Error(ErrorCode::kValidation,
                  "session '" + s.id + "' belongs to " + key.label() +
                      ", not to the front's group " + front.group().label());
    }
    PerSessionDelta d{s.id, s.mos, s.mos, s.watts, s.watts, false};
    const ParetoPoint* pt = front.at_least(s.mos);
    if (pt != nullptr && pt->watts < s.watts) {
      d.new_mos = pt->mos;
      d.new_watts = pt->watts;
      d.remapped = true;
    }
    deltas.push_back(std::move(d));
    labels.push_back(front.group().label());
  }
  return finalize_report("params", "same-QoE front remap, group " +
                                       front.group().label(),
                         std::move(deltas), labels, 0);
}

SavingsReport optimize_params(std::span<const ScoredSession> scored,
                              const FrontMap& fronts) {
  std::vector<PerSessionDelta> deltas;
  std::vector<std::string> labels;
  deltas.reserve(scored.size());
  labels.reserve(scored.size());
  for (const ScoredSession& s : scored) {
    const GroupKey key{s.device.tag, s.codec.tag};
    const ParetoFront& front = require_front(fronts, key);
    PerSessionDelta d{s.id, s.mos, s.mos, s.watts, s.watts, false};
    const ParetoPoint* pt = front.at_least(s.mos);
    if (pt != nullptr && pt->watts < s.watts) {
      d.new_mos = pt->mos;
      d.new_watts = pt->watts;
      d.remapped = true;
    }
    deltas.push_back(std::move(d));
    labels.push_back(key.label());
  }
  return finalize_report("params", "same-QoE front remap", std::move(deltas),
                         labels, 0);
}

SavingsReport switch_codec(
    std::span<const ScoredSession> scored,
    const std::map<DeviceClass, SwitchDirection>& directions,
    const ProfileSet& profiles, const QoeModelConfig& qoe) {
  if (directions.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "codec switch needs a direction map");
  }
  std::vector<PerSessionDelta> deltas;
  std::vector<std::string> labels;
  std::string configuration;
  for (const auto& [device, dir] : directions) {
    if (!configuration.empty()) configuration += ", ";
    configuration +=
        device.tag + ": " + dir.from.tag + " -> " + dir.to.tag;
  }
  for (const ScoredSession& s : scored) {
    const auto dir = directions.find(s.device);
    if (dir == directions.end()) continue;
    const Session& raw = require_features(s, "codec_switch");

    Session as_from = raw;
    as_from.codec = dir->second.from;
    Session as_to = raw;
    as_to.codec = dir->second.to;

    PerSessionDelta d;
    d.id = s.id;
    d.old_watts =
        estimate_with_profile(as_from,
                              profiles.require(s.device, dir->second.from))
            .watts;
    d.new_watts =
        estimate_with_profile(as_to, profiles.require(s.device, dir->second.to))
            .watts;
    d.old_mos = estimate_mos(as_from, qoe).value;
    d.new_mos = estimate_mos(as_to, qoe).value;
    d.remapped = true;
    deltas.push_back(std::move(d));
    labels.push_back(s.device.tag);
  }
  return finalize_report("codec_switch", std::move(configuration),
                         std::move(deltas), labels, 0);
}

SavingsReport switch_device(std::span<const ScoredSession> scored,
                            const DeviceClass& from, const DeviceClass& to,
                            const ProfileSet& profiles) {
  if (from == to) {
    throw Error(ErrorCode::kInvalidSpec,
                "device switch endpoints must differ, got '" + from.tag + "'");
  }
  std::vector<PerSessionDelta> deltas;
  std::vector<std::string> labels;
  for (const ScoredSession& s : scored) {
    if (s.device != from) continue;
    const Session& raw = require_features(s, "device_switch");
    Session moved = raw;
    moved.device = to;
    PerSessionDelta d;
    d.id = s.id;
    d.old_mos = s.mos;
    d.new_mos = s.mos;  // the quality model has no device term
    d.old_watts = s.watts;
    d.new_watts =
        estimate_with_profile(moved, profiles.require(to, s.codec)).watts;
    d.remapped = true;
    deltas.push_back(std::move(d));
    labels.push_back(s.codec.tag);
  }
  return finalize_report("device_switch", from.tag + " -> " + to.tag,
                         std::move(deltas), labels, 0);
}

SavingsReport apply_cap(std::span<const ScoredSession> scored,
                        const FrontMap& fronts, double cap) {
  if (!std::isfinite(cap) || cap < kMosFloor || cap > kMosCeil) {
    throw Error(ErrorCode::kInvalidSpec,
                "cap must lie in [1, 5], got " + format_double(cap));
  }
  std::vector<PerSessionDelta> deltas;
  std::vector<std::string> labels;
  std::size_t n_infeasible = 0;
  deltas.reserve(scored.size());
  labels.reserve(scored.size());
  for (const ScoredSession& s : scored) {
    const ParetoFront& front =
        require_front(fronts, GroupKey{s.device.tag, s.codec.tag});
    PerSessionDelta d{s.id, s.mos, s.mos, s.watts, s.watts, false};
    if (cap_session(d, front, cap)) ++n_infeasible;
    deltas.push_back(std::move(d));
    labels.push_back(s.device.tag);
  }
  return finalize_report("cap", "mos <= " + format_double(cap),
                         std::move(deltas), labels, n_infeasible);
}

std::vector<CapSweepRow> cap_sweep(std::span<const ScoredSession> scored,
                                   const FrontMap& fronts,
                                   std::span<const double> caps) {
  if (caps.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "cap sweep needs at least one cap");
  }
  for (std::size_t i = 1; i < caps.size(); ++i) {
    if (!(caps[i] > caps[i - 1])) {
      throw Error(ErrorCode::kInvalidSpec,
                  "cap grid must be strictly increasing, got " +
                      format_double(caps[i - 1]) + " then " +
                      format_double(caps[i]));
    }
  }
  std::vector<CapSweepRow> rows;
  rows.reserve(caps.size());
  for (double cap : caps) {
    const SavingsReport report = apply_cap(scored, fronts, cap);
    CapSweepRow row;
    row.cap = cap;
    row.relative_saving = report.relative_saving_ratio_of_means;
    row.absolute_saving_watts = report.absolute_saving_watts;
    row.n_remapped = report.n_remapped;
    row.n_infeasible = report.n_infeasible;
    rows.push_back(row);
  }
  return rows;
}

SavingsReport joint_optimize(std::span<const ScoredSession> scored,
                             const ProfileSet& profiles,
                             const QoeModelConfig& qoe, const FrontMap& fronts,
                             std::optional<double> cap) {
  if (scored.empty()) {
    throw Error(ErrorCode::kEmptyInput, "joint optimization needs sessions");
  }
  // Pick the profile with the lowest dataset-mean power; ties fall to the
  // first in (device, codec) order, which ProfileSet::profiles() guarantees.
  const DeviceCodecProfile* best = nullptr;
  double best_mean = std::numeric_limits<double>::infinity();
  for (const DeviceCodecProfile& candidate : profiles.profiles()) {
    std::vector<double> watts;
    watts.reserve(scored.size());
    for (const ScoredSession& s : scored) {
      const Session& raw = require_features(s, "joint");
      Session moved = raw;
      moved.device = candidate.device;
      moved.codec = candidate.codec;
      watts.push_back(estimate_with_profile(moved, candidate).watts);
    }
    const double candidate_mean = mean(watts);
    if (candidate_mean < best_mean) {
      best_mean = candidate_mean;
      best = &candidate;
    }
  }
  if (best == nullptr) {
    throw Error(ErrorCode::kMissingProfile, "profile set is empty");
  }

  const GroupKey target_group{best->device.tag, best->codec.tag};
  const auto front_it = fronts.find(target_group);
  const ParetoFront* front =
      front_it == fronts.end() ? nullptr : &front_it->second;

  std::vector<PerSessionDelta> deltas;
  std::vector<std::string> labels;
  std::size_t n_infeasible = 0;
  deltas.reserve(scored.size());
  labels.reserve(scored.size());
  for (const ScoredSession& s : scored) {
    const Session& raw = require_features(s, "joint");
    Session moved = raw;
    moved.device = best->device;
    moved.codec = best->codec;

    PerSessionDelta d;
    d.id = s.id;
    d.old_mos = s.mos;
    d.old_watts = s.watts;
    d.new_watts = estimate_with_profile(moved, *best).watts;
    d.new_mos = estimate_mos(moved, qoe).value;
    d.remapped = true;

    if (front != nullptr) {
      const ParetoPoint* pt = front->at_least(d.new_mos);
      if (pt != nullptr && pt->watts < d.new_watts) {
        d.new_mos = pt->mos;
        d.new_watts = pt->watts;
      }
      if (cap && cap_session(d, *front, *cap)) ++n_infeasible;
    }
    if (d.new_watts > d.old_watts) {
      // Switching would cost this session power; leave it as logged.
      d.new_watts = d.old_watts;
      d.new_mos = d.old_mos;
    }
    d.remapped = d.new_watts != d.old_watts || d.new_mos != d.old_mos;
    deltas.push_back(std::move(d));
    labels.push_back(s.device.tag);
  }

  std::string configuration = "all -> (" + best->device.tag + ", " +
                              best->codec.tag + ")";
  if (cap) configuration += ", cap " + format_double(*cap);
  return finalize_report("joint", std::move(configuration), std::move(deltas),
                         labels, n_infeasible);
}

}  // namespace streamwatt
