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
#include <string>
#include <vector>

#include "streamwatt/errors.hpp"

namespace streamwatt {

// The QoE model scores at most this much of a session; longer sessions are
// truncated before scoring. Power and energy always use the full duration.
inline constexpr double kQoeTruncationSeconds = 300.0;

// Ingest sanity bounds; values beyond these are treated as corrupt rows.
inline constexpr int kMaxWidth = 7680;
inline constexpr int kMaxHeight = 4320;
inline constexpr double kMaxFps = 240.0;

// The absolute-category-rating scale every MOS in this library lives on.
inline constexpr double kMosFloor = 1.0;
inline constexpr double kMosCeil = 5.0;

/// Video codec, identified by an open string tag. "H264" and "VP9" are the
/// built-in tags; new tags may be registered at runtime.
struct Codec {
  std::string tag;
  auto operator<=>(const Codec&) const = default;
};

/// Playback device class, identified by an open string tag. "Laptop" and
/// "DesktopPC" are built in.
struct DeviceClass {
  std::string tag;
  auto operator<=>(const DeviceClass&) const = default;
};

inline const std::string kCodecH264 = "H264";
inline const std::string kCodecVp9 = "VP9";
inline const std::string kDeviceLaptop = "Laptop";
inline const std::string kDeviceDesktopPc = "DesktopPC";

// Open registry of string tags. Tags must be non-empty and unique.
class TagRegistry {
 public:
  explicit TagRegistry(std::vector<std::string> builtins);

  void add(const std::string& tag);
  bool contains(const std::string& tag) const noexcept;
  const std::vector<std::string>& tags() const noexcept { return tags_; }

 private:
  std::vector<std::string> tags_;
};

TagRegistry builtin_codec_registry();
TagRegistry builtin_device_registry();

/// Per-session video encoding parameters in canonical units: pixels,
/// frames/second, bits/second.
struct VideoParams {
  int width = 0;
  int height = 0;
  double fps = 0.0;
  double bitrate_bps = 0.0;
};

/// Session-level playback impairment aggregates.
struct Impairments {
  double loading_delay_s = 0.0;
  int stall_count = 0;
  double stall_total_s = 0.0;
};

/// One streaming playback session. Immutable after construction; all
/// operations over sessions are pure.
struct Session {
  std::string id;
  DeviceClass device;
  Codec codec;
  VideoParams params;
  Impairments impairments;
  double duration_s = 0.0;
  bool online = true;
};

/// width * height * fps, the pixel throughput the decoder must sustain.
double pixels_per_second(const VideoParams& p);

// Throw ValidationError naming the offending field.
void validate(const VideoParams& p);
void validate(const Impairments& i);
void validate(const Session& s);

/// Clamps duration to the QoE window and stalling time to the clamped
/// duration. Every other field is preserved; idempotent.
Session truncate_for_qoe(const Session& s);

}  // namespace streamwatt
