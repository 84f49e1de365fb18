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

#include "streamwatt/qoe_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace streamwatt {

double QoeModelConfig::efficiency(const Codec& codec) const {
  auto it = codec_efficiency.find(codec.tag);
  if (it == codec_efficiency.end()) {
    throw Error(ErrorCode::kUnknownCodec,
                "no codec efficiency registered for '" + codec.tag + "'");
  }
  return it->second;
}

void QoeModelConfig::validate() const {
  if (!std::isfinite(bpp_scale) || bpp_scale <= 0.0) {
    throw ValidationError("bpp_scale", "must be finite and > 0");
  }
  for (const auto& [tag, eff] : codec_efficiency) {
    if (tag.empty()) throw ValidationError("codec_efficiency", "empty codec tag");
    if (!std::isfinite(eff) || eff <= 0.0) {
      throw ValidationError("codec_efficiency",
                            "efficiency for '" + tag + "' must be > 0");
    }
  }
  if (!std::isfinite(stall_count_penalty) || stall_count_penalty < 0.0) {
    throw ValidationError("stall_count_penalty", "must be finite and >= 0");
  }
  if (!std::isfinite(stall_ratio_penalty) || stall_ratio_penalty < 0.0) {
    throw ValidationError("stall_ratio_penalty", "must be finite and >= 0");
  }
  if (!std::isfinite(loading_penalty) || loading_penalty < 0.0) {
    throw ValidationError("loading_penalty", "must be finite and >= 0");
  }
}

QoeModelConfig QoeModelConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw ValidationError("qoe_config", "must be a JSON object");
  }
  QoeModelConfig cfg;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "bpp_scale") {
        cfg.bpp_scale = value.get<double>();
      } else if (key == "codec_efficiency") {
        if (!value.is_object()) {
          throw ValidationError("codec_efficiency", "must be a JSON object");
        }
        // Entries extend or override the built-in map.
        for (const auto& [tag, eff] : value.items()) {
          cfg.codec_efficiency[tag] = eff.get<double>();
        }
      } else if (key == "stall_count_penalty") {
        cfg.stall_count_penalty = value.get<double>();
      } else if (key == "stall_ratio_penalty") {
        cfg.stall_ratio_penalty = value.get<double>();
      } else if (key == "loading_penalty") {
        cfg.loading_penalty = value.get<double>();
      } else if (key == "fps_reference") {
        if (value.get<double>() != kFpsReference) {
          throw ValidationError("fps_reference", "is fixed at 24");
        }
      } else {
        throw ValidationError("qoe_config", "unknown field '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("qoe_config", e.what());
  }
  cfg.validate();
  return cfg;
}

QoeModelConfig QoeModelConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kUnreadableFile,
                "cannot open QoE config file: " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("qoe_config", std::string("invalid JSON: ") + e.what());
  }
  return from_json(doc);
}

double core_video_quality(const VideoParams& p, const Codec& codec,
                          const QoeModelConfig& cfg) {
  const double bpp = p.bitrate_bps / pixels_per_second(p);
  double q = 1.0 + 4.0 * (1.0 - std::exp(-cfg.bpp_scale *
                                         cfg.efficiency(codec) * bpp));
  if (p.fps < QoeModelConfig::kFpsReference) {
    q = 1.0 + (q - 1.0) * (p.fps / QoeModelConfig::kFpsReference);
  }
  return std::clamp(q, 1.0, 5.0);
}

double impairment_multiplier(const Impairments& i, double duration_s,
                             const QoeModelConfig& cfg) {
  const double stall_ratio = i.stall_total_s / duration_s;
  return std::exp(-cfg.stall_ratio_penalty * stall_ratio -
                  cfg.stall_count_penalty * static_cast<double>(i.stall_count) -
                  cfg.loading_penalty * i.loading_delay_s);
}

MosScore estimate_mos(const Session& s, const QoeModelConfig& cfg) {
  const Session t = truncate_for_qoe(s);
  const double q = core_video_quality(t.params, t.codec, cfg);
  const double m = impairment_multiplier(t.impairments, t.duration_s, cfg);
  const double mos = 1.0 + (q - 1.0) * m;
  return {std::clamp(mos, 1.0, 5.0)};
}

MosScore attach_external_mos(double mos) {
  if (!(mos >= 1.0 && mos <= 5.0)) {
    throw Error(ErrorCode::kMosOutOfRange,
                "MOS must lie in [1, 5], got " + std::to_string(mos));
  }
  return {mos};
}

}  // namespace streamwatt
