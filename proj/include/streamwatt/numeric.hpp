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

#include <charconv>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>

namespace streamwatt {

// Neumaier-compensated sequential sum. Aggregations run over per-session
// arrays in index order, so results do not depend on the parallelism degree.
inline double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

inline double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return compensated_sum(values) / static_cast<double>(values.size());
}

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Strict full-string parse; returns false on trailing garbage or overflow.
bool parse_double(std::string_view text, double& out);
bool parse_i64(std::string_view text, long long& out);

// Runs fn(begin, end) over [0, n) split into contiguous chunks, `jobs` at a
// time. Chunks write disjoint output ranges; results must not depend on the
// chunking, which the callers guarantee by construction.
void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace streamwatt
