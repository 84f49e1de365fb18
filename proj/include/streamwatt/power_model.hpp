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

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "streamwatt/session.hpp"

#include <nlohmann/json.hpp>

namespace streamwatt {

// Number of features in the linear power model.
inline constexpr std::size_t kPowerFeatureCount = 5;

/// Feature row of the linear power model. The codec does not appear as a
/// numeric entry; it selects which coefficient profile is applied.
struct FeatureVector {
  double intercept = 1.0;
  double fps = 0.0;
  double pixels_per_second = 0.0;
  double bitrate = 0.0;
  double online = 0.0;  // 0.0 or 1.0

  std::array<double, kPowerFeatureCount> values() const {
    return {intercept, fps, pixels_per_second, bitrate, online};
  }
};

/// v = [1, fps, width*height*fps, bitrate, online ? 1 : 0]
FeatureVector featurize(const Session& s);

/// Trained coefficient vector for one (device, codec) pair, ordered
/// [intercept, fps, pixels_per_second, bitrate, online]. The intercept is
/// the device's base power in watts.
struct DeviceCodecProfile {
  DeviceClass device;
  Codec codec;
  std::array<double, kPowerFeatureCount> coefficients{};
  std::string provenance;
};

/// Read-only set of profiles keyed by (device, codec). Duplicate keys are
/// rejected at insertion; iteration order is sorted by key, so every
/// computation over the set is deterministic.
class ProfileSet {
 public:
  void add(DeviceCodecProfile profile);

  const DeviceCodecProfile* find(const DeviceClass& device,
                                 const Codec& codec) const noexcept;

  /// Like find, but throws MissingProfile naming the pair.
  const DeviceCodecProfile& require(const DeviceClass& device,
                                    const Codec& codec) const;

  const std::vector<DeviceCodecProfile>& profiles() const noexcept {
    return profiles_;
  }
  std::size_t size() const noexcept { return profiles_.size(); }
  bool empty() const noexcept { return profiles_.empty(); }

  /// Parses the profile file schema: a JSON list of objects with fields
  /// `device`, `codec`, `coefficients` (5 numbers), `provenance`. Unknown
  /// fields and duplicate (device, codec) keys are rejected.
  static ProfileSet from_json(const nlohmann::json& doc);
  static ProfileSet load(const std::filesystem::path& path);

 private:
  std::vector<DeviceCodecProfile> profiles_;  // sorted by (device, codec)
};

/// Estimated mean device power for one session.
struct PowerEstimate {
  double watts = 0.0;
  DeviceClass device;  // profile key the estimate was produced under
  Codec codec;
};

/// Dot product of featurize(s) with the profile matching (s.device,
/// s.codec). Throws MissingProfile or NonPositivePower.
PowerEstimate estimate_power(const Session& s, const ProfileSet& profiles);

/// Same dot product against an explicit profile; used for counterfactual
/// codec/device evaluation. The estimate carries the profile's key, not the
/// session's.
PowerEstimate estimate_with_profile(const Session& s,
                                    const DeviceCodecProfile& profile);

/// watts * duration, over the original (untruncated) duration.
double session_energy_joules(const Session& s, const PowerEstimate& estimate);

/// Batch form over SoA feature arrays, kernel-backed. Performs no
/// positivity check; callers validate the outputs against their sessions.
void estimate_power_batch(std::span<const double> fps,
                          std::span<const double> pps,
                          std::span<const double> bitrate,
                          std::span<const double> online,
                          const DeviceCodecProfile& profile,
                          std::span<double> watts_out);

}  // namespace streamwatt
