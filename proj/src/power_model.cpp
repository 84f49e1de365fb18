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

#include "streamwatt/power_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "streamwatt/kernels/kernels.hpp"

namespace streamwatt {
namespace {

kernels::PowerCoeffs to_coeffs(const DeviceCodecProfile& p) {
  return {p.coefficients[0], p.coefficients[1], p.coefficients[2],
          p.coefficients[3], p.coefficients[4]};
}

bool key_less(const DeviceCodecProfile& p, const DeviceClass& device,
              const Codec& codec) {
  if (p.device.tag != device.tag) return p.device.tag < device.tag;
  return p.codec.tag < codec.tag;
}

}  // namespace

FeatureVector featurize(const Session& s) {
  FeatureVector v;
  v.intercept = 1.0;
  v.fps = s.params.fps;
  v.pixels_per_second = pixels_per_second(s.params);
  v.bitrate = s.params.bitrate_bps;
  v.online = s.online ? 1.0 : 0.0;
  return v;
}

void ProfileSet::add(DeviceCodecProfile profile) {
  if (profile.device.tag.empty()) throw ValidationError("device", "must be non-empty");
  if (profile.codec.tag.empty()) throw ValidationError("codec", "must be non-empty");
  for (double c : profile.coefficients) {
    if (!std::isfinite(c)) throw ValidationError("coefficients", "must be finite");
  }
  if (find(profile.device, profile.codec) != nullptr) {
    throw ValidationError("profiles", "duplicate profile for (" +
                                          profile.device.tag + ", " +
                                          profile.codec.tag + ")");
  }
  auto pos = std::lower_bound(
      profiles_.begin(), profiles_.end(), profile,
      [](const DeviceCodecProfile& a, const DeviceCodecProfile& b) {
        return key_less(a, b.device, b.codec);
      });
  profiles_.insert(pos, std::move(profile));
}

const DeviceCodecProfile* ProfileSet::find(const DeviceClass& device,
                                           const Codec& codec) const noexcept {
  auto it = std::lower_bound(profiles_.begin(), profiles_.end(), device,
                             [&codec](const DeviceCodecProfile& p,
                                      const DeviceClass& d) {
                               return key_less(p, d, codec);
                             });
  if (it == profiles_.end() || it->device.tag != device.tag ||
      it->codec.tag != codec.tag) {
    return nullptr;
  }
  return &*it;
}

const DeviceCodecProfile& ProfileSet::require(const DeviceClass& device,
                                              const Codec& codec) const {
  const DeviceCodecProfile* p = find(device, codec);
  if (p == nullptr) {
    throw Error(ErrorCode::kMissingProfile,
                "no profile for (" + device.tag + ", " + codec.tag + ")");
  }
  return *p;
}

ProfileSet ProfileSet::from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) {
    throw ValidationError("profiles", "profile file must be a JSON list");
  }
  ProfileSet set;
  for (const auto& entry : doc) {
    if (!entry.is_object()) {
      throw ValidationError("profiles", "each profile must be a JSON object");
    }
    for (const auto& [key, _] : entry.items()) {
      if (key != "device" && key != "codec" && key != "coefficients" &&
          key != "provenance") {
        throw ValidationError("profiles", "unknown field '" + key + "'");
      }
    }
    DeviceCodecProfile p;
    try {
      p.device.tag = entry.at("device").get<std::string>();
      p.codec.tag = entry.at("codec").get<std::string>();
      p.provenance = entry.at("provenance").get<std::string>();
      const auto& coeffs = entry.at("coefficients");
      if (!coeffs.is_array() || coeffs.size() != kPowerFeatureCount) {
        throw ValidationError(
            "coefficients",
            "must be a list of exactly " + std::to_string(kPowerFeatureCount) +
                " numbers, ordered [intercept, fps, pixels_per_second, "
                "bitrate, online]");
      }
      for (std::size_t i = 0; i < kPowerFeatureCount; ++i) {
        p.coefficients[i] = coeffs[i].get<double>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("profiles", e.what());
    }
    set.add(std::move(p));
  }
  return set;
}

ProfileSet ProfileSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kUnreadableFile,
                "cannot open profile file: " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("profiles", std::string("invalid JSON: ") + e.what());
  }
  return from_json(doc);
}

PowerEstimate estimate_power(const Session& s, const ProfileSet& profiles) {
  return estimate_with_profile(s, profiles.require(s.device, s.codec));
}

PowerEstimate estimate_with_profile(const Session& s,
                                    const DeviceCodecProfile& profile) {
  const FeatureVector v = featurize(s);
  double watts = 0.0;
  // Single-element batch, so the scalar and SIMD paths agree bit for bit.
  kernels::power_estimate(&v.fps, &v.pixels_per_second, &v.bitrate, &v.online,
                          to_coeffs(profile), &watts, 1);
  if (!(watts > 0.0)) {
    throw Error(ErrorCode::kNonPositivePower,
                "session '" + s.id + "': profile (" + profile.device.tag +
                    ", " + profile.codec.tag + ") predicts " +
                    std::to_string(watts) + " W");
  }
  return {watts, profile.device, profile.codec};
}

double session_energy_joules(const Session& s, const PowerEstimate& estimate) {
  return estimate.watts * s.duration_s;
}

void estimate_power_batch(std::span<const double> fps,
                          std::span<const double> pps,
                          std::span<const double> bitrate,
                          std::span<const double> online,
                          const DeviceCodecProfile& profile,
                          std::span<double> watts_out) {
  kernels::power_estimate(fps.data(), pps.data(), bitrate.data(),
                          online.data(), to_coeffs(profile), watts_out.data(),
                          watts_out.size());
}

}  // namespace streamwatt
