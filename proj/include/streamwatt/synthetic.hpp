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

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "streamwatt/session.hpp"

namespace streamwatt {

/// One streaming-ladder rung a synthetic session can land on. Bitrates are
/// whole kbps so datasets round-trip bit-exactly through the kbps column.
struct LadderRung {
  int width = 0;
  int height = 0;
  double fps = 0.0;
  double bitrate_kbps = 0.0;
  double weight = 0.0;
};

/// Everything that determines a synthetic dataset. The seed fully fixes the
/// output; two runs with equal specs are byte-identical.
struct SyntheticSpec {
  std::size_t n_sessions = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> device_shares;
  std::vector<std::pair<std::string, double>> codec_shares;
  std::vector<LadderRung> ladder;
  double online_share = 0.95;

  // Impairment and length distributions (exponential unless noted).
  double stall_free_share = 0.85;    // probability of zero stalls
  double mean_stall_count = 1.2;     // extra stalls beyond the first
  double mean_stall_seconds = 2.0;   // per stall event
  double mean_loading_delay_s = 1.0;
  double max_loading_delay_s = 30.0;
  double mean_duration_s = 480.0;
  double min_duration_s = 60.0;
  double max_duration_s = 7200.0;

  /// Throws InvalidSpec on bad shares/weights/ranges. n_sessions may be 0.
  void validate() const;

  nlohmann::json to_json() const;
  static SyntheticSpec from_json(const nlohmann::json& doc);
  static SyntheticSpec load(const std::filesystem::path& path);

  /// Two devices, two codecs, a 144p-2160p ladder, laptop-heavy device mix;
  /// the fixture the acceptance run is built on.
  static SyntheticSpec paper_like(std::size_t n, std::uint64_t seed);
};

/// Deterministic synthetic sessions, ids "s0000000" onward in input order.
/// All emitted sessions satisfy validate(session).
std::vector<Session> generate_synthetic(const SyntheticSpec& spec);

}  // namespace streamwatt
