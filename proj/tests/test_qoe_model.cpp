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

#include <cmath>
#include <random>

#include <doctest/doctest.h>
#include <nlohmann/json.hpp>

#include "test_support.hpp"

namespace streamwatt {
namespace {

using test::make_session;

// Frozen oracle values, computed independently of the implementation:
//   bpp  = 5e6 / (1920*1080*24) = 5e6 / 49766400
//   q24  = 1 + 4*(1 - exp(-60*bpp))          = 4.990360337864196
//   q12  = 1 + (q24 - 1)*(12/24)             = 2.995180168932098
//   mos  = 1 + (q24 - 1)*exp(-0.15*2)        = 3.9561316453754523
constexpr double kQ24 = 4.990360337864196;
constexpr double kQ12 = 2.995180168932098;
constexpr double kMosTwoStalls = 3.9561316453754523;

TEST_CASE("core quality worked example at the 24 fps reference") {
  const QoeModelConfig cfg;
  const VideoParams p{1920, 1080, 24.0, 5e6};
  CHECK(core_video_quality(p, {kCodecH264}, cfg) ==
        doctest::Approx(kQ24).epsilon(1e-12));
}

TEST_CASE("frame rates below 24 scale the above-floor quality linearly") {
  const QoeModelConfig cfg;
  // Same bits per pixel as the 24 fps example: halving fps halves bitrate.
  const VideoParams p{1920, 1080, 12.0, 2.5e6};
  const double q12 = core_video_quality(p, {kCodecH264}, cfg);
  CHECK(q12 == doctest::Approx(kQ12).epsilon(1e-12));
  CHECK(q12 - 1.0 == doctest::Approx((kQ24 - 1.0) * 0.5).epsilon(1e-12));
}

TEST_CASE("frame rates at or above 24 earn no extra credit") {
  const QoeModelConfig cfg;
  // 24 -> 60 fps is a x2.5 pixel-throughput increase; scaling the bitrate by
  // the same factor keeps bits per pixel identical, so quality must match.
  const VideoParams at24{1920, 1080, 24.0, 5e6};
  const VideoParams at60{1920, 1080, 60.0, 12.5e6};
  CHECK(core_video_quality(at24, {kCodecH264}, cfg) ==
        core_video_quality(at60, {kCodecH264}, cfg));
}

TEST_CASE("codec efficiency shifts quality at equal bitrate") {
  const QoeModelConfig cfg;
  const VideoParams p{1280, 720, 30.0, 1e6};
  const double h264 = core_video_quality(p, {kCodecH264}, cfg);
  const double vp9 = core_video_quality(p, {kCodecVp9}, cfg);
  CHECK(vp9 > h264);  // 1.3x efficiency at the same bits per pixel

  try {
    core_video_quality(p, {"AV1"}, cfg);
    FAIL_CHECK("expected UnknownCodec");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownCodec);
  }
}

TEST_CASE("impairment multiplier") {
  const QoeModelConfig cfg;
  CHECK(impairment_multiplier({0.0, 0, 0.0}, 300.0, cfg) == 1.0);

  // exp(-2.0*(30/300) - 0.15*1 - 0.02*0) = exp(-0.35)
  CHECK(impairment_multiplier({0.0, 1, 30.0}, 300.0, cfg) ==
        doctest::Approx(std::exp(-0.35)).epsilon(1e-12));

  // Loading delay alone: exp(-0.02*10) = exp(-0.2)
  CHECK(impairment_multiplier({10.0, 0, 0.0}, 300.0, cfg) ==
        doctest::Approx(std::exp(-0.2)).epsilon(1e-12));

  const double m = impairment_multiplier({5.0, 3, 60.0}, 300.0, cfg);
  CHECK(m > 0.0);
  CHECK(m <= 1.0);
}

TEST_CASE("composite worked example: two stalls with zero stalled seconds") {
  const QoeModelConfig cfg;
  Session s = make_session();
  s.params = {1920, 1080, 24.0, 5e6};
  s.impairments = {0.0, 2, 0.0};
  CHECK(estimate_mos(s, cfg).value ==
        doctest::Approx(kMosTwoStalls).epsilon(1e-12));
}

TEST_CASE("QoE truncation caps the scored window at 300 s") {
  const QoeModelConfig cfg;
  Session s = make_session();
  s.duration_s = 600.0;
  s.impairments = {0.0, 1, 60.0};

  // The stall ratio must be evaluated against the truncated 300 s window
  // (60/300), not the full duration (60/600).
  const Session t = truncate_for_qoe(s);
  const double q = core_video_quality(t.params, t.codec, cfg);
  const double expected =
      1.0 + (q - 1.0) * impairment_multiplier(t.impairments, 300.0, cfg);
  CHECK(estimate_mos(s, cfg).value == doctest::Approx(expected).epsilon(1e-12));

  const double wrong =
      1.0 + (q - 1.0) * impairment_multiplier(s.impairments, 600.0, cfg);
  CHECK(estimate_mos(s, cfg).value != doctest::Approx(wrong).epsilon(1e-12));

  // Scoring the truncated session directly changes nothing (idempotence).
  CHECK(estimate_mos(t, cfg).value == estimate_mos(s, cfg).value);
}

TEST_CASE("MOS stays on the 1..5 scale at the extremes") {
  const QoeModelConfig cfg;
  Session rich = make_session();
  rich.params = {3840, 2160, 60.0, 4e7};
  CHECK(estimate_mos(rich, cfg).value <= 5.0);
  CHECK(estimate_mos(rich, cfg).value > 4.5);

  Session poor = make_session();
  poor.params = {256, 144, 24.0, 1000.0};
  poor.impairments = {30.0, 50, 90.0};
  const double mos = estimate_mos(poor, cfg).value;
  CHECK(mos >= 1.0);
  CHECK(mos < 1.5);

  Session silent = make_session();
  silent.params.bitrate_bps = 0.0;
  CHECK(estimate_mos(silent, cfg).value == 1.0);
}

TEST_CASE("MOS is monotone in bitrate and anti-monotone in impairments") {
  const QoeModelConfig cfg;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> bitrate(1e4, 2e7);
  std::uniform_int_distribution<int> stalls(0, 10);
  std::uniform_real_distribution<double> seconds(0.0, 60.0);

  for (int i = 0; i < 500; ++i) {
    Session s = make_session();
    s.params.bitrate_bps = bitrate(rng);
    s.impairments.stall_count = stalls(rng) + 1;
    s.impairments.stall_total_s = seconds(rng);
    s.impairments.loading_delay_s = seconds(rng) / 10.0;
    const double base = estimate_mos(s, cfg).value;

    Session richer = s;
    richer.params.bitrate_bps *= 1.5;
    CHECK(estimate_mos(richer, cfg).value >= base);

    Session stallier = s;
    stallier.impairments.stall_count += 1;
    CHECK(estimate_mos(stallier, cfg).value <= base);

    Session longer_stalls = s;
    longer_stalls.impairments.stall_total_s += 5.0;
    CHECK(estimate_mos(longer_stalls, cfg).value <= base);

    Session slower_start = s;
    slower_start.impairments.loading_delay_s += 2.0;
    CHECK(estimate_mos(slower_start, cfg).value <= base);
  }
}

TEST_CASE("attach_external_mos validates and never clamps") {
  CHECK(attach_external_mos(3.7).value == 3.7);
  CHECK(attach_external_mos(1.0).value == 1.0);
  CHECK(attach_external_mos(5.0).value == 5.0);

  for (double bad : {0.9, 5.1, -1.0, std::nan("")}) {
    try {
      attach_external_mos(bad);
      FAIL_CHECK("expected MosOutOfRange for " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kMosOutOfRange);
    }
  }
}

TEST_CASE("QoE config JSON: defaults, overrides, and unknown fields") {
  const QoeModelConfig defaults =
      QoeModelConfig::from_json(nlohmann::json::object());
  CHECK(defaults.bpp_scale == 60.0);
  CHECK(defaults.stall_count_penalty == 0.15);
  CHECK(defaults.stall_ratio_penalty == 2.0);
  CHECK(defaults.loading_penalty == 0.02);
  CHECK(defaults.efficiency({kCodecVp9}) == 1.3);

  const auto cfg = QoeModelConfig::from_json(nlohmann::json::parse(
      R"({"bpp_scale": 45.0, "codec_efficiency": {"AV1": 1.5}})"));
  CHECK(cfg.bpp_scale == 45.0);
  CHECK(cfg.efficiency({"AV1"}) == 1.5);
  CHECK(cfg.efficiency({kCodecH264}) == 1.0);  // built-ins survive extension

  CHECK_THROWS_AS(
      QoeModelConfig::from_json(nlohmann::json::parse(R"({"typo": 1})")),
      ValidationError);
  CHECK_THROWS_AS(
      QoeModelConfig::from_json(nlohmann::json::parse(R"({"bpp_scale": -1})")),
      ValidationError);
  CHECK_THROWS_AS(QoeModelConfig::from_json(
                      nlohmann::json::parse(R"({"fps_reference": 30})")),
                  ValidationError);
  CHECK_NOTHROW(QoeModelConfig::from_json(
      nlohmann::json::parse(R"({"fps_reference": 24})")));
}

}  // namespace
}  // namespace streamwatt
