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

#include <filesystem>
#include <map>
#include <string>

#include "streamwatt/session.hpp"

#include <nlohmann/json.hpp>

namespace streamwatt {

/// Estimated mean opinion score; always within [1, 5].
struct MosScore {
  double value = 1.0;
};

/// Tunables of the bundled session-level QoE estimator. The defaults are
/// smooth, documented placeholders, not fitted constants; override them via
/// a JSON config file. Quality gains above the 24 fps reference are never
/// credited, and the reference itself is not configurable.
struct QoeModelConfig {
  double bpp_scale = 60.0;
  std::map<std::string, double> codec_efficiency = {
      {kCodecH264, 1.0},
      {kCodecVp9, 1.3},
  };
  double stall_count_penalty = 0.15;
  double stall_ratio_penalty = 2.0;
  double loading_penalty = 0.02;  // per second of loading delay

  static constexpr double kFpsReference = 24.0;

  double efficiency(const Codec& codec) const;  // throws UnknownCodec
  void validate() const;

  /// Missing fields take defaults; unknown fields are rejected.
  static QoeModelConfig from_json(const nlohmann::json& doc);
  static QoeModelConfig load(const std::filesystem::path& path);
};

/// Base visual quality in [1, 5], driven by bits per pixel. Frame rates
/// below 24 fps scale the quality above the floor linearly; rates at or
/// above 24 fps earn no extra credit.
double core_video_quality(const VideoParams& p, const Codec& codec,
                          const QoeModelConfig& cfg);

/// Multiplicative degradation in (0, 1] from stalling and loading delay.
/// `duration_s` is the post-truncation duration.
double impairment_multiplier(const Impairments& i, double duration_s,
                             const QoeModelConfig& cfg);

/// Full session estimate: truncate, score the video quality, then shrink
/// the above-floor part by the impairment multiplier.
MosScore estimate_mos(const Session& s, const QoeModelConfig& cfg);

/// Validates an externally computed MOS (e.g. from a standards-conformant
/// estimator). Out-of-range values are errors, never clamped.
MosScore attach_external_mos(double mos);

}  // namespace streamwatt
