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
// NEON kernels for aarch64, 2 doubles per vector. Mirrors the scalar
// reference operation order; no fused multiply-add.

#include "kernels_impl.hpp"

#if STREAMWATT_HAVE_NEON

#include <arm_neon.h>

namespace streamwatt::kernels {
namespace {

void power_estimate_neon(const double* fps, const double* pps,
                         const double* bitrate, const double* online,
                         const PowerCoeffs& c, double* watts, std::size_t n) {
  const float64x2_t base = vdupq_n_f64(c.base);
  const float64x2_t cf = vdupq_n_f64(c.fps);
  const float64x2_t cp = vdupq_n_f64(c.pixels_per_second);
  const float64x2_t cb = vdupq_n_f64(c.bitrate);
  const float64x2_t co = vdupq_n_f64(c.online);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t acc = vaddq_f64(base, vmulq_f64(cf, vld1q_f64(fps + i)));
    acc = vaddq_f64(acc, vmulq_f64(cp, vld1q_f64(pps + i)));
    acc = vaddq_f64(acc, vmulq_f64(cb, vld1q_f64(bitrate + i)));
    acc = vaddq_f64(acc, vmulq_f64(co, vld1q_f64(online + i)));
    vst1q_f64(watts + i, acc);
  }
  for (; i < n; ++i) {
    double acc = c.base + c.fps * fps[i];
    acc = acc + c.pixels_per_second * pps[i];
    acc = acc + c.bitrate * bitrate[i];
    acc = acc + c.online * online[i];
    watts[i] = acc;
  }
}

void multiply_neon(const double* a, const double* b, double* out,
                   std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  }
  for (; i < n; ++i) {
    out[i] = a[i] * b[i];
  }
}

MinMax minmax_neon(const double* v, std::size_t n) {
  std::size_t i = 0;
  double lo = v[0];
  double hi = v[0];
  if (n >= 2) {
    float64x2_t vlo = vld1q_f64(v);
    float64x2_t vhi = vlo;
    for (i = 2; i + 2 <= n; i += 2) {
      const float64x2_t x = vld1q_f64(v + i);
      vlo = vminq_f64(x, vlo);
      vhi = vmaxq_f64(vhi, x);
    }
    lo = vgetq_lane_f64(vlo, 0);
    const double lo1 = vgetq_lane_f64(vlo, 1);
    lo = (lo1 < lo) ? lo1 : lo;
    hi = vgetq_lane_f64(vhi, 0);
    const double hi1 = vgetq_lane_f64(vhi, 1);
    hi = (hi < hi1) ? hi1 : hi;
  }
  for (; i < n; ++i) {
    lo = (v[i] < lo) ? v[i] : lo;
    hi = (hi < v[i]) ? v[i] : hi;
  }
  return {lo, hi};
}

}  // namespace

const KernelOps& neon_ops() noexcept {
  static const KernelOps ops{power_estimate_neon, multiply_neon, minmax_neon};
  return ops;
}

}  // namespace streamwatt::kernels

#endif  // STREAMWATT_HAVE_NEON
