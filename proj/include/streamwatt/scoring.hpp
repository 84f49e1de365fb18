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
#include <vector>

#include "streamwatt/policy.hpp"

namespace streamwatt {

/// Scores every session: power through its (device, codec) profile using the
/// batched kernels, quality through the QoE model unless the dataset carried
/// a measured MOS for that row. `external_mos` must be empty or run parallel
/// to `sessions`; measured values are validated, never clamped. The result
/// order matches the input order and is byte-identical for any `jobs`.
std::vector<ScoredSession> score_sessions(
    std::span<const Session> sessions, const ProfileSet& profiles,
    const QoeModelConfig& qoe,
    std::span<const std::optional<double>> external_mos, int jobs);

/// Input-order indices of each (device, codec) group, keyed in group order.
std::map<GroupKey, std::vector<std::size_t>> group_indices(
    std::span<const ScoredSession> scored);

/// Outlier-filters and builds the front of every group. `fallback_groups`,
/// when given, collects the groups whose filter had to fall back to k = 0.
FrontMap build_fronts(std::span<const ScoredSession> scored,
                      const OutlierRule& rule,
                      std::vector<GroupKey>* fallback_groups = nullptr);

}  // namespace streamwatt
