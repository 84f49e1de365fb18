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

#include "streamwatt/pareto.hpp"

#include <random>
#include <set>
#include <tuple>

#include <doctest/doctest.h>

#include "test_support.hpp"

namespace streamwatt {
namespace {

using test::brute_force_front;
using test::ids_of;
using test::naive_outlier_filter;
using test::random_points;

const GroupKey kGroup{"Laptop", "H264"};

ParetoPoint pt(std::string id, double mos, double watts) {
  return {std::move(id), mos, watts, false};
}

TEST_CASE("dominates follows the definition") {
  CHECK(dominates(pt("a", 4.0, 25.0), pt("b", 3.5, 30.0)));
  CHECK_FALSE(dominates(pt("a", 3.0, 20.0), pt("b", 3.0, 20.0)));  // equal
  CHECK_FALSE(dominates(pt("a", 4.0, 25.0), pt("b", 3.0, 20.0)));  // trade-off
  CHECK_FALSE(dominates(pt("a", 3.0, 20.0), pt("b", 4.0, 25.0)));

  // Ties on one axis with strictness on the other still dominate.
  CHECK(dominates(pt("a", 4.0, 20.0), pt("b", 4.0, 25.0)));
  CHECK(dominates(pt("a", 4.5, 20.0), pt("b", 4.0, 20.0)));
}

TEST_CASE("dominance is a strict partial order") {
  std::mt19937_64 rng(1);
  const auto points = random_points(rng, 60, 8);
  for (const auto& a : points) {
    CHECK_FALSE(dominates(a, a));  // irreflexive
    for (const auto& b : points) {
      if (dominates(a, b)) CHECK_FALSE(dominates(b, a));  // antisymmetric
      for (const auto& c : points) {
        if (dominates(a, b) && dominates(b, c)) {
          CHECK(dominates(a, c));  // transitive
        }
      }
    }
  }
}

TEST_CASE("pareto_front worked examples") {
  const std::vector<ParetoPoint> points{
      pt("a", 3.0, 20.0), pt("b", 4.0, 25.0), pt("c", 3.5, 30.0)};
  const ParetoFront front = pareto_front(kGroup, points);
  REQUIRE(front.points().size() == 2);
  CHECK(front.points()[0].session_id == "a");
  CHECK(front.points()[1].session_id == "b");
  CHECK(front.min_mos() == 3.0);
  CHECK(front.max_mos() == 4.0);
  for (const ParetoPoint& p : front.points()) CHECK(p.efficient);

  const ParetoFront single =
      pareto_front(kGroup, std::vector<ParetoPoint>{pt("only", 2.5, 40.0)});
  REQUIRE(single.points().size() == 1);
  CHECK(single.points()[0].session_id == "only");
}

TEST_CASE("duplicate (mos, watts) pairs collapse to the lowest session id") {
  const std::vector<ParetoPoint> points{
      pt("s9", 3.0, 20.0), pt("s2", 3.0, 20.0), pt("s5", 3.0, 20.0)};
  const ParetoFront front = pareto_front(kGroup, points);
  REQUIRE(front.points().size() == 1);
  CHECK(front.points()[0].session_id == "s2");
}

TEST_CASE("pareto_front rejects empty input") {
  try {
    pareto_front(kGroup, std::vector<ParetoPoint>{});
    FAIL_CHECK("expected EmptyInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyInput);
  }
}

TEST_CASE("front equals the quadratic oracle on random data") {
  std::mt19937_64 rng(20260815);
  for (int round = 0; round < 60; ++round) {
    // Alternate between continuous clouds and a coarse grid; the grid makes
    // exact duplicates and single-axis ties common.
    const std::size_t n = 1 + rng() % 400;
    const int quantization = (round % 2 == 0) ? 8 : 0;
    const auto points = random_points(rng, n, quantization);

    const ParetoFront front = pareto_front(kGroup, points);
    const auto oracle = brute_force_front(points);

    std::vector<std::tuple<double, double, std::string>> got;
    for (const ParetoPoint& p : front.points()) {
      got.emplace_back(p.mos, p.watts, p.session_id);
    }
    REQUIRE(got.size() == oracle.size());
    CHECK(got == oracle);
  }
}

TEST_CASE("front is a strict staircase in both axes") {
  std::mt19937_64 rng(77);
  for (int round = 0; round < 20; ++round) {
    const auto points = random_points(rng, 300, round % 2 ? 8 : 0);
    const ParetoFront front = pareto_front(kGroup, points);
    REQUIRE_FALSE(front.empty());
    for (std::size_t i = 1; i < front.points().size(); ++i) {
      CHECK(front.points()[i].mos > front.points()[i - 1].mos);
      CHECK(front.points()[i].watts > front.points()[i - 1].watts);
    }
  }
}

TEST_CASE("efficient membership is invariant under power rescaling") {
  std::mt19937_64 rng(5);
  const auto points = random_points(rng, 200, 8);
  std::vector<ParetoPoint> scaled = points;
  for (ParetoPoint& p : scaled) p.watts *= 3.7;

  const auto base_ids = ids_of(pareto_front(kGroup, points).points());
  const auto scaled_ids = ids_of(pareto_front(kGroup, scaled).points());
  CHECK(base_ids == scaled_ids);
}

TEST_CASE("min_power_at_mos worked examples") {
  const std::vector<ParetoPoint> points{pt("a", 3.0, 20.0),
                                        pt("b", 4.0, 25.0)};
  const ParetoFront front = pareto_front(kGroup, points);

  CHECK(min_power_at_mos(front, 3.5, MosQuery::kAtLeast).session_id == "b");
  CHECK(min_power_at_mos(front, 3.5, MosQuery::kAtMost).session_id == "a");
  CHECK(min_power_at_mos(front, 3.0, MosQuery::kAtLeast).session_id == "a");
  CHECK(min_power_at_mos(front, 3.0, MosQuery::kAtMost).session_id == "a");
  CHECK(min_power_at_mos(front, 4.0, MosQuery::kAtLeast).session_id == "b");

  const ParetoFront single =
      pareto_front(kGroup, std::vector<ParetoPoint>{pt("a", 3.0, 20.0)});
  CHECK(min_power_at_mos(single, 3.0, MosQuery::kAtLeast).session_id == "a");
  CHECK(min_power_at_mos(single, 3.0, MosQuery::kAtMost).session_id == "a");

  for (auto [target, mode] :
       {std::pair{4.5, MosQuery::kAtLeast}, std::pair{2.5, MosQuery::kAtMost}}) {
    try {
      min_power_at_mos(front, target, mode);
      FAIL_CHECK("expected NoFeasiblePoint at target " << target);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNoFeasiblePoint);
    }
  }
}

TEST_CASE("at_least is optimal against the raw set, not just the front") {
  std::mt19937_64 rng(13);
  const auto points = random_points(rng, 400, 8);
  const ParetoFront front = pareto_front(kGroup, points);
  std::uniform_real_distribution<double> target_dist(1.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const double target = target_dist(rng);
    const ParetoPoint* chosen = front.at_least(target);
    for (const ParetoPoint& p : points) {
      if (p.mos >= target && chosen != nullptr) {
        CHECK(chosen->watts <= p.watts);
      }
      if (p.mos >= target && chosen == nullptr) {
        FAIL_CHECK("front missed a feasible raw point");
      }
    }
  }
}

TEST_CASE("outlier filter: k = 0 is the identity") {
  std::mt19937_64 rng(3);
  const auto points = random_points(rng, 50);
  const auto kept = filter_outliers(points, OutlierRule{0, 0.1, 1.0});
  CHECK(ids_of(kept) == ids_of(points));
}

TEST_CASE("outlier filter removes an isolated point from a dense cluster") {
  std::mt19937_64 rng(4);
  std::vector<ParetoPoint> points;
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  for (int i = 0; i < 100; ++i) {
    points.push_back(
        pt("c" + std::to_string(i), 3.0 + jitter(rng), 20.0 + jitter(rng)));
  }
  points.push_back(pt("lonely", 4.8, 90.0));

  const OutlierRule rule{5, 0.1, std::optional<double>{1.0}};
  const auto kept = filter_outliers(points, rule);
  CHECK(kept.size() == 100);
  for (const ParetoPoint& p : kept) CHECK(p.session_id != "lonely");
}

TEST_CASE("outlier filter can empty a sparse group") {
  const std::vector<ParetoPoint> points{
      pt("a", 1.5, 10.0), pt("b", 3.0, 50.0), pt("c", 4.5, 90.0)};
  const auto kept = filter_outliers(points, OutlierRule{5, 0.1, 1.0});
  CHECK(kept.empty());
}

TEST_CASE("outlier filter matches the quadratic neighborhood oracle") {
  std::mt19937_64 rng(20250101);
  for (int round = 0; round < 12; ++round) {
    const auto points = random_points(rng, 400, 8);
    const double mos_eps = (round % 3 == 0) ? 0.25 : 0.1;
    const double watts_eps = (round % 2 == 0) ? 2.0 : 0.75;
    for (int k : {0, 1, 3, 10}) {
      const OutlierRule rule{k, mos_eps, watts_eps};
      const auto got = ids_of(filter_outliers(points, rule));
      const auto want =
          ids_of(naive_outlier_filter(points, k, mos_eps, watts_eps));
      CHECK(got == want);
    }
  }
}

TEST_CASE("default watts radius is 2% of the group's power range") {
  std::vector<ParetoPoint> points;
  // Powers span exactly [10, 60], so the resolved radius is 1.0 W. The two
  // probes sit 0.9 W and 1.1 W away from a 6-point cluster at 20 W.
  for (int i = 0; i < 6; ++i) {
    points.push_back(pt("c" + std::to_string(i), 3.0, 20.0));
  }
  points.push_back(pt("lo", 3.0, 10.0));
  points.push_back(pt("hi", 3.0, 60.0));
  points.push_back(pt("inside", 3.0, 20.9));
  points.push_back(pt("outside", 3.0, 21.1));

  OutlierRule rule;
  rule.k = 5;
  rule.mos_eps = 0.1;
  REQUIRE_FALSE(rule.watts_eps.has_value());

  const GroupAnalysis analysis = analyze_group(kGroup, points, rule);
  CHECK(analysis.watts_eps_used == doctest::Approx(1.0).epsilon(1e-12));

  const auto kept = ids_of(filter_outliers(points, rule));
  CHECK(std::find(kept.begin(), kept.end(), "inside") != kept.end());
  CHECK(std::find(kept.begin(), kept.end(), "outside") == kept.end());
}

TEST_CASE("analyze_group flags, fallback, and front consistency") {
  std::mt19937_64 rng(21);
  // Coarse q = 2 grid: ~135 distinct cells for 1000 points, so most points
  // have >= 5 exact duplicates and the k = 5 rule keeps a solid core.
  const auto points = random_points(rng, 1000, 2);
  const OutlierRule rule{5, 0.1, std::nullopt};
  const GroupAnalysis analysis = analyze_group(kGroup, points, rule);

  REQUIRE(analysis.kept.size() == points.size());
  REQUIRE(analysis.efficient.size() == points.size());
  CHECK_FALSE(analysis.outlier_fallback);
  CHECK_FALSE(analysis.front.empty());

  // efficient implies kept, and the front is exactly the efficient kept set
  // modulo duplicate collapse.
  std::vector<ParetoPoint> kept_points;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (analysis.efficient[i]) CHECK(analysis.kept[i]);
    if (analysis.kept[i]) kept_points.push_back(points[i]);
  }
  const auto oracle = brute_force_front(kept_points);
  std::set<std::pair<double, double>> oracle_pairs;
  for (const auto& [mos, watts, id] : oracle) oracle_pairs.insert({mos, watts});
  for (std::size_t i = 0; i < points.size(); ++i) {
    const bool on_front =
        analysis.kept[i] &&
        oracle_pairs.count({points[i].mos, points[i].watts}) > 0;
    CHECK(analysis.efficient[i] == on_front);
  }

  // A group too sparse for the rule falls back to keeping everything.
  const std::vector<ParetoPoint> sparse{
      pt("a", 1.5, 10.0), pt("b", 3.0, 50.0), pt("c", 4.5, 90.0)};
  const GroupAnalysis fallback = analyze_group(kGroup, sparse, rule);
  CHECK(fallback.outlier_fallback);
  CHECK(fallback.kept == std::vector<bool>{true, true, true});
  CHECK(fallback.front.points().size() == 3);
}

}  // namespace
}  // namespace streamwatt
