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
//
// Scalar reference kernels. The SIMD variants replicate exactly this
// per-element operation order; the build disables fma contraction so the
// reference stays reproducible.

#include "kernels_impl.hpp"

namespace streamwatt::kernels {
namespace {

void power_estimate_scalar(const double* fps, const double* pps,
                           const double* bitrate, const double* online,
                           const PowerCoeffs& c, double* watts,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = c.base + c.fps * fps[i];
    acc = acc + c.pixels_per_second * pps[i];
    acc = acc + c.bitrate * bitrate[i];
    acc = acc + c.online * online[i];
    watts[i] = acc;
  }
}

void multiply_scalar(const double* a, const double* b, double* out,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = a[i] * b[i];
  }
}

MinMax minmax_scalar(const double* v, std::size_t n) {
  // Select-form min/max, matching the SIMD compare semantics.
  double lo = v[0];
  double hi = v[0];
  for (std::size_t i = 1; i < n; ++i) {
    lo = (v[i] < lo) ? v[i] : lo;
    hi = (hi < v[i]) ? v[i] : hi;
  }
  return {lo, hi};
}

}  // namespace

const KernelOps& scalar_ops() noexcept {
  static const KernelOps ops{power_estimate_scalar, multiply_scalar,
                             minmax_scalar};
  return ops;
}

}  // namespace streamwatt::kernels
