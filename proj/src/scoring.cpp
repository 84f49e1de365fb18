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

#include "streamwatt/scoring.hpp"

#include <utility>

#include "streamwatt/kernels/kernels.hpp"
#include "streamwatt/numeric.hpp"

namespace streamwatt {

std::vector<ScoredSession> score_sessions(
    std::span<const Session> sessions, const ProfileSet& profiles,
    const QoeModelConfig& qoe,
    std::span<const std::optional<double>> external_mos, int jobs) {
  if (sessions.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no sessions to score");
  }
  if (!external_mos.empty() && external_mos.size() != sessions.size()) {
    throw Error(ErrorCode::kValidation,
                "external MOS column does not match the session count");
  }

  // Resolve profiles first so a missing pair fails before any work, naming
  // the first offending session.
  std::vector<const DeviceCodecProfile*> resolved(sessions.size());
  std::map<GroupKey, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const Session& s = sessions[i];
    const DeviceCodecProfile* p = profiles.find(s.device, s.codec);
    if (p == nullptr) {
      throw Error(ErrorCode::kMissingProfile,
                  "session '" + s.id + "' needs a profile for (" +
                      s.device.tag + ", " + s.codec.tag + ")");
    }
    resolved[i] = p;
    groups[GroupKey{s.device.tag, s.codec.tag}].push_back(i);
  }

  std::vector<ScoredSession> scored(sessions.size());

  // Power: one batched kernel call per group over gathered feature arrays.
  for (const auto& [key, indices] : groups) {
    const DeviceCodecProfile& profile = *resolved[indices.front()];
    std::vector<double> fps, pps, bitrate, online, watts;
    fps.reserve(indices.size());
    pps.reserve(indices.size());
    bitrate.reserve(indices.size());
    online.reserve(indices.size());
    watts.resize(indices.size());
    for (std::size_t idx : indices) {
      const FeatureVector v = featurize(sessions[idx]);
      fps.push_back(v.fps);
      pps.push_back(v.pixels_per_second);
      bitrate.push_back(v.bitrate);
      online.push_back(v.online);
    }
    estimate_power_batch(fps, pps, bitrate, online, profile, watts);
    for (std::size_t k = 0; k < indices.size(); ++k) {
      const std::size_t idx = indices[k];
      if (!(watts[k] > 0.0)) {
        throw Error(ErrorCode::kNonPositivePower,
                    "profile (" + key.device + ", " + key.codec +
                        ") yields non-positive power for session '" +
                        sessions[idx].id + "'");
      }
      scored[idx].watts = watts[k];
    }
  }

  // Quality plus bookkeeping; chunked, each slot written exactly once.
  parallel_for(sessions.size(), jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Session& s = sessions[i];
      ScoredSession& out = scored[i];
      out.id = s.id;
      out.device = s.device;
      out.codec = s.codec;
      out.session = &s;
      out.energy_joules = out.watts * s.duration_s;
      if (!external_mos.empty() && external_mos[i].has_value()) {
        try {
          out.mos = attach_external_mos(*external_mos[i]).value;
        } catch (const Error& e) {
          throw Error(e.code(),
                      "session '" + s.id + "': " + std::string(e.what()));
        }
      } else {
        out.mos = estimate_mos(s, qoe).value;
      }
    }
  });

  return scored;
}

std::map<GroupKey, std::vector<std::size_t>> group_indices(
    std::span<const ScoredSession> scored) {
  std::map<GroupKey, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    groups[GroupKey{scored[i].device.tag, scored[i].codec.tag}].push_back(i);
  }
  return groups;
}

FrontMap build_fronts(std::span<const ScoredSession> scored,
                      const OutlierRule& rule,
                      std::vector<GroupKey>* fallback_groups) {
  if (scored.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no scored sessions to analyze");
  }
  FrontMap fronts;
  for (const auto& [key, indices] : group_indices(scored)) {
    std::vector<ParetoPoint> points;
    points.reserve(indices.size());
    for (std::size_t idx : indices) {
      points.push_back(
          ParetoPoint{scored[idx].id, scored[idx].mos, scored[idx].watts});
    }
    GroupAnalysis analysis = analyze_group(key, points, rule);
    if (analysis.outlier_fallback && fallback_groups != nullptr) {
      fallback_groups->push_back(key);
    }
    fronts.emplace(key, std::move(analysis.front));
  }
  return fronts;
}

}  // namespace streamwatt
