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

#include "streamwatt/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <span>

#include "streamwatt/numeric.hpp"

namespace streamwatt {
namespace {

using nlohmann::json;

/// splitmix64; hand-rolled so the stream is identical on every platform and
/// standard-library version, which std::mt19937 + std::*_distribution do
/// not guarantee.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Exponential with the given mean; uses log1p(-u) so u = 0 is safe.
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  /// Index into a positive weight vector, proportional to weight.
  std::size_t discrete(std::span<const double> weights, double total) {
    const double target = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (target < acc) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::uint64_t state_;
};

void check_shares(const std::vector<std::pair<std::string, double>>& shares,
                  const std::string& what) {
  if (shares.empty()) {
    throw Error(ErrorCode::kInvalidSpec, what + " must not be empty");
  }
  double total = 0.0;
  for (const auto& [tag, share] : shares) {
    if (tag.empty()) {
      throw Error(ErrorCode::kInvalidSpec, what + " has an empty tag");
    }
    if (!(share >= 0.0) || !std::isfinite(share)) {
      throw Error(ErrorCode::kInvalidSpec,
                  what + " share for '" + tag + "' must be >= 0");
    }
    total += share;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidSpec,
                what + " must sum to 1, got " + format_double(total));
  }
}

std::string session_id(std::size_t index) {
  std::string digits = std::to_string(index);
  return "s" + std::string(digits.size() < 7 ? 7 - digits.size() : 0, '0') +
         digits;
}

json shares_to_json(const std::vector<std::pair<std::string, double>>& shares) {
  json arr = json::array();
  for (const auto& [tag, share] : shares) {
    arr.push_back({{"tag", tag}, {"share", share}});
  }
  return arr;
}

std::vector<std::pair<std::string, double>> shares_from_json(
    const json& arr, const std::string& what) {
  if (!arr.is_array()) {
    throw Error(ErrorCode::kInvalidSpec, what + " must be an array");
  }
  std::vector<std::pair<std::string, double>> shares;
  for (const json& entry : arr) {
    if (!entry.is_object() || !entry.contains("tag") ||
        !entry.contains("share") || !entry.at("tag").is_string() ||
        !entry.at("share").is_number()) {
      throw Error(ErrorCode::kInvalidSpec,
                  what + " entries need string 'tag' and numeric 'share'");
    }
    shares.emplace_back(entry.at("tag").get<std::string>(),
                        entry.at("share").get<double>());
  }
  return shares;
}

double spec_number(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_number()) {
    throw Error(ErrorCode::kInvalidSpec,
                std::string("'") + key + "' must be a number");
  }
  return doc.at(key).get<double>();
}

}  // namespace

void SyntheticSpec::validate() const {
  check_shares(device_shares, "device_shares");
  check_shares(codec_shares, "codec_shares");
  if (ladder.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "ladder must not be empty");
  }
  double weight_total = 0.0;
  for (const LadderRung& rung : ladder) {
    if (rung.width <= 0 || rung.width > kMaxWidth || rung.height <= 0 ||
        rung.height > kMaxHeight || !(rung.fps > 0.0) || rung.fps > kMaxFps ||
        !(rung.bitrate_kbps >= 0.0) || !std::isfinite(rung.bitrate_kbps)) {
      throw Error(ErrorCode::kInvalidSpec,
                  "ladder rung " + std::to_string(rung.width) + "x" +
                      std::to_string(rung.height) + " is out of range");
    }
    if (!(rung.weight > 0.0) || !std::isfinite(rung.weight)) {
      throw Error(ErrorCode::kInvalidSpec, "ladder weights must be > 0");
    }
    weight_total += rung.weight;
  }
  if (!(weight_total > 0.0)) {
    throw Error(ErrorCode::kInvalidSpec, "ladder weights must sum to > 0");
  }
  if (!(online_share >= 0.0 && online_share <= 1.0)) {
    throw Error(ErrorCode::kInvalidSpec, "online_share must be in [0, 1]");
  }
  if (!(stall_free_share >= 0.0 && stall_free_share <= 1.0)) {
    throw Error(ErrorCode::kInvalidSpec, "stall_free_share must be in [0, 1]");
  }
  for (const auto& [name, value] :
       {std::pair<const char*, double>{"mean_stall_count", mean_stall_count},
        {"mean_stall_seconds", mean_stall_seconds},
        {"mean_loading_delay_s", mean_loading_delay_s},
        {"max_loading_delay_s", max_loading_delay_s},
        {"mean_duration_s", mean_duration_s},
        {"min_duration_s", min_duration_s},
        {"max_duration_s", max_duration_s}}) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::kInvalidSpec,
                  std::string(name) + " must be finite and >= 0");
    }
  }
  if (!(min_duration_s > 0.0) || min_duration_s > max_duration_s) {
    throw Error(ErrorCode::kInvalidSpec,
                "duration range must satisfy 0 < min <= max");
  }
}

json SyntheticSpec::to_json() const {
  json ladder_json = json::array();
  for (const LadderRung& rung : ladder) {
    ladder_json.push_back({{"width", rung.width},
                           {"height", rung.height},
                           {"fps", rung.fps},
                           {"bitrate_kbps", rung.bitrate_kbps},
                           {"weight", rung.weight}});
  }
  return {{"n_sessions", n_sessions},
          {"seed", seed},
          {"device_shares", shares_to_json(device_shares)},
          {"codec_shares", shares_to_json(codec_shares)},
          {"ladder", std::move(ladder_json)},
          {"online_share", online_share},
          {"stall_free_share", stall_free_share},
          {"mean_stall_count", mean_stall_count},
          {"mean_stall_seconds", mean_stall_seconds},
          {"mean_loading_delay_s", mean_loading_delay_s},
          {"max_loading_delay_s", max_loading_delay_s},
          {"mean_duration_s", mean_duration_s},
          {"min_duration_s", min_duration_s},
          {"max_duration_s", max_duration_s}};
}

SyntheticSpec SyntheticSpec::from_json(const json& doc) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::kInvalidSpec, "spec must be a JSON object");
  }
  static const std::vector<std::string> kKnown = {
      "n_sessions",           "seed",
      "device_shares",        "codec_shares",
      "ladder",               "online_share",
      "stall_free_share",     "mean_stall_count",
      "mean_stall_seconds",   "mean_loading_delay_s",
      "max_loading_delay_s",  "mean_duration_s",
      "min_duration_s",       "max_duration_s"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) {
      throw Error(ErrorCode::kInvalidSpec, "unknown spec field '" + key + "'");
    }
  }
  SyntheticSpec defaults;
  SyntheticSpec spec;
  if (doc.contains("n_sessions")) {
    if (!doc.at("n_sessions").is_number_unsigned() &&
        !doc.at("n_sessions").is_number_integer()) {
      throw Error(ErrorCode::kInvalidSpec, "'n_sessions' must be an integer");
    }
    const long long n = doc.at("n_sessions").get<long long>();
    if (n < 0) {
      throw Error(ErrorCode::kInvalidSpec, "'n_sessions' must be >= 0");
    }
    spec.n_sessions = static_cast<std::size_t>(n);
  }
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned() &&
        !doc.at("seed").is_number_integer()) {
      throw Error(ErrorCode::kInvalidSpec, "'seed' must be an integer");
    }
    spec.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (!doc.contains("device_shares") || !doc.contains("codec_shares") ||
      !doc.contains("ladder")) {
    throw Error(ErrorCode::kInvalidSpec,
                "spec needs device_shares, codec_shares and ladder");
  }
  spec.device_shares = shares_from_json(doc.at("device_shares"), "device_shares");
  spec.codec_shares = shares_from_json(doc.at("codec_shares"), "codec_shares");
  for (const json& entry : doc.at("ladder")) {
    if (!entry.is_object()) {
      throw Error(ErrorCode::kInvalidSpec, "ladder entries must be objects");
    }
    LadderRung rung;
    rung.width = static_cast<int>(spec_number(entry, "width", 0.0));
    rung.height = static_cast<int>(spec_number(entry, "height", 0.0));
    rung.fps = spec_number(entry, "fps", 0.0);
    rung.bitrate_kbps = spec_number(entry, "bitrate_kbps", 0.0);
    rung.weight = spec_number(entry, "weight", 0.0);
    spec.ladder.push_back(rung);
  }
  spec.online_share = spec_number(doc, "online_share", defaults.online_share);
  spec.stall_free_share =
      spec_number(doc, "stall_free_share", defaults.stall_free_share);
  spec.mean_stall_count =
      spec_number(doc, "mean_stall_count", defaults.mean_stall_count);
  spec.mean_stall_seconds =
      spec_number(doc, "mean_stall_seconds", defaults.mean_stall_seconds);
  spec.mean_loading_delay_s =
      spec_number(doc, "mean_loading_delay_s", defaults.mean_loading_delay_s);
  spec.max_loading_delay_s =
      spec_number(doc, "max_loading_delay_s", defaults.max_loading_delay_s);
  spec.mean_duration_s =
      spec_number(doc, "mean_duration_s", defaults.mean_duration_s);
  spec.min_duration_s =
      spec_number(doc, "min_duration_s", defaults.min_duration_s);
  spec.max_duration_s =
      spec_number(doc, "max_duration_s", defaults.max_duration_s);
  spec.validate();
  return spec;
}

SyntheticSpec SyntheticSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kUnreadableFile, "cannot read '" + path.string() + "'");
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::kInvalidSpec,
                "'" + path.string() + "' is not valid JSON");
  }
  return from_json(doc);
}

SyntheticSpec SyntheticSpec::paper_like(std::size_t n, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n_sessions = n;
  spec.seed = seed;
  spec.device_shares = {{kDeviceLaptop, 0.78}, {kDeviceDesktopPc, 0.22}};
  spec.codec_shares = {{kCodecH264, 0.5}, {kCodecVp9, 0.5}};
  spec.ladder = {
      {256, 144, 24.0, 4.0, 0.03},     {426, 240, 24.0, 12.0, 0.04},
      {640, 360, 24.0, 30.0, 0.06},    {854, 480, 24.0, 70.0, 0.09},
      {1280, 720, 24.0, 220.0, 0.12},  {1280, 720, 50.0, 480.0, 0.07},
      {1920, 1080, 25.0, 800.0, 0.11}, {1920, 1080, 30.0, 1000.0, 0.17},
      {1920, 1080, 60.0, 2200.0, 0.10}, {2560, 1440, 30.0, 2800.0, 0.06},
      {2560, 1440, 60.0, 6000.0, 0.05}, {3840, 2160, 30.0, 9000.0, 0.05},
      {3840, 2160, 60.0, 20000.0, 0.05}};
  return spec;
}

std::vector<Session> generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  std::vector<double> device_weights, codec_weights, rung_weights;
  for (const auto& [tag, share] : spec.device_shares) {
    device_weights.push_back(share);
  }
  for (const auto& [tag, share] : spec.codec_shares) {
    codec_weights.push_back(share);
  }
  double rung_total = 0.0;
  for (const LadderRung& rung : spec.ladder) {
    rung_weights.push_back(rung.weight);
    rung_total += rung.weight;
  }

  std::vector<Session> sessions;
  sessions.reserve(spec.n_sessions);
  for (std::size_t i = 0; i < spec.n_sessions; ++i) {
    Session s;
    s.id = session_id(i);
    s.device.tag = spec.device_shares[rng.discrete(device_weights, 1.0)].first;
    s.codec.tag = spec.codec_shares[rng.discrete(codec_weights, 1.0)].first;
    const LadderRung& rung =
        spec.ladder[rng.discrete(rung_weights, rung_total)];
    s.params.width = rung.width;
    s.params.height = rung.height;
    s.params.fps = rung.fps;
    s.params.bitrate_bps = rung.bitrate_kbps * 1000.0;
    s.duration_s =
        std::min(spec.max_duration_s,
                 spec.min_duration_s + rng.exponential(spec.mean_duration_s));
    s.impairments.loading_delay_s =
        std::min(spec.max_loading_delay_s,
                 rng.exponential(spec.mean_loading_delay_s));
    if (rng.uniform() >= spec.stall_free_share) {
      s.impairments.stall_count =
          1 + static_cast<int>(rng.exponential(spec.mean_stall_count));
      double total = 0.0;
      for (int k = 0; k < s.impairments.stall_count; ++k) {
        total += rng.exponential(spec.mean_stall_seconds);
      }
      // Stalls can never exceed a quarter of the watch time; keeps every
      // session valid and the MOS distribution reasonably top-heavy.
      s.impairments.stall_total_s = std::min(total, 0.25 * s.duration_s);
    }
    s.online = rng.uniform() < spec.online_share;
    sessions.push_back(std::move(s));
  }
  return sessions;
}

}  // namespace streamwatt
