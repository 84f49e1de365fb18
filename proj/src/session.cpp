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

#include "streamwatt/session.hpp"

#include <algorithm>
#include <cmath>

namespace streamwatt {

TagRegistry::TagRegistry(std::vector<std::string> builtins) {
  for (auto& tag : builtins) add(tag);
}

void TagRegistry::add(const std::string& tag) {
  if (tag.empty()) {
    throw ValidationError("tag", "must be non-empty");
  }
  if (contains(tag)) {
    throw ValidationError("tag", "duplicate tag '" + tag + "'");
  }
  tags_.push_back(tag);
}

bool TagRegistry::contains(const std::string& tag) const noexcept {
  return std::find(tags_.begin(), tags_.end(), tag) != tags_.end();
}

TagRegistry builtin_codec_registry() {
  return TagRegistry({kCodecH264, kCodecVp9});
}

TagRegistry builtin_device_registry() {
  return TagRegistry({kDeviceLaptop, kDeviceDesktopPc});
}

double pixels_per_second(const VideoParams& p) {
  return static_cast<double>(p.width) * static_cast<double>(p.height) * p.fps;
}

void validate(const VideoParams& p) {
  if (p.width <= 0) throw ValidationError("width", "must be > 0");
  if (p.width > kMaxWidth) throw ValidationError("width", "exceeds sanity bound 7680");
  if (p.height <= 0) throw ValidationError("height", "must be > 0");
  if (p.height > kMaxHeight) throw ValidationError("height", "exceeds sanity bound 4320");
  if (!std::isfinite(p.fps) || p.fps <= 0.0) throw ValidationError("fps", "must be finite and > 0");
  if (p.fps > kMaxFps) throw ValidationError("fps", "exceeds sanity bound 240");
  if (!std::isfinite(p.bitrate_bps) || p.bitrate_bps < 0.0) {
    throw ValidationError("bitrate_kbps", "must be finite and >= 0");
  }
  const double pps = pixels_per_second(p);
  if (!std::isfinite(pps) || pps <= 0.0) {
    throw ValidationError("fps", "pixels per second must be finite and > 0");
  }
}

void validate(const Impairments& i) {
  if (!std::isfinite(i.loading_delay_s) || i.loading_delay_s < 0.0) {
    throw ValidationError("loading_delay_s", "must be finite and >= 0");
  }
  if (i.stall_count < 0) throw ValidationError("stall_count", "must be >= 0");
  if (!std::isfinite(i.stall_total_s) || i.stall_total_s < 0.0) {
    throw ValidationError("stall_total_s", "must be finite and >= 0");
  }
  if (i.stall_count == 0 && i.stall_total_s != 0.0) {
    throw ValidationError("stall_total_s", "must be 0 when stall_count is 0");
  }
}

void validate(const Session& s) {
  if (s.id.empty()) throw ValidationError("id", "must be non-empty");
  if (s.device.tag.empty()) throw ValidationError("device", "must be non-empty");
  if (s.codec.tag.empty()) throw ValidationError("codec", "must be non-empty");
  validate(s.params);
  validate(s.impairments);
  if (!std::isfinite(s.duration_s) || s.duration_s <= 0.0) {
    throw ValidationError("duration_s", "must be finite and > 0");
  }
}

Session truncate_for_qoe(const Session& s) {
  Session out = s;
  out.duration_s = std::min(s.duration_s, kQoeTruncationSeconds);
  out.impairments.stall_total_s =
      std::min(s.impairments.stall_total_s, out.duration_s);
  return out;
}

}  // namespace streamwatt
