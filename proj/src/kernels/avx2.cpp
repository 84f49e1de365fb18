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
// AVX2 kernels, 4 doubles per lane group. Separate mul and add (no fma) so
// each lane performs the identical IEEE operation sequence as the scalar
// reference. Compiled with -mavx2; only dispatched on CPUs that report AVX2.

#include "kernels_impl.hpp"

#if STREAMWATT_HAVE_AVX2

#include <immintrin.h>

namespace streamwatt::kernels {
namespace {

void power_estimate_avx2(const double* fps, const double* pps,
                         const double* bitrate, const double* online,
                         const PowerCoeffs& c, double* watts, std::size_t n) {
  const __m256d base = _mm256_set1_pd(c.base);
  const __m256d cf = _mm256_set1_pd(c.fps);
  const __m256d cp = _mm256_set1_pd(c.pixels_per_second);
  const __m256d cb = _mm256_set1_pd(c.bitrate);
  const __m256d co = _mm256_set1_pd(c.online);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_add_pd(base, _mm256_mul_pd(cf, _mm256_loadu_pd(fps + i)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(cp, _mm256_loadu_pd(pps + i)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(cb, _mm256_loadu_pd(bitrate + i)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(co, _mm256_loadu_pd(online + i)));
    _mm256_storeu_pd(watts + i, acc);
  }
  for (; i < n; ++i) {
    double acc = c.base + c.fps * fps[i];
    acc = acc + c.pixels_per_second * pps[i];
    acc = acc + c.bitrate * bitrate[i];
    acc = acc + c.online * online[i];
    watts[i] = acc;
  }
}

void multiply_avx2(const double* a, const double* b, double* out,
                   std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i,
                     _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) {
    out[i] = a[i] * b[i];
  }
}

MinMax minmax_avx2(const double* v, std::size_t n) {
  std::size_t i = 0;
  double lo = v[0];
  double hi = v[0];
  if (n >= 4) {
    __m256d vlo = _mm256_loadu_pd(v);
    __m256d vhi = vlo;
    for (i = 4; i + 4 <= n; i += 4) {
      const __m256d x = _mm256_loadu_pd(v + i);
      vlo = _mm256_min_pd(x, vlo);
      vhi = _mm256_max_pd(vhi, x);
    }
    alignas(32) double tmp[4];
    _mm256_store_pd(tmp, vlo);
    lo = tmp[0];
    for (int k = 1; k < 4; ++k) lo = (tmp[k] < lo) ? tmp[k] : lo;
    _mm256_store_pd(tmp, vhi);
    hi = tmp[0];
    for (int k = 1; k < 4; ++k) hi = (hi < tmp[k]) ? tmp[k] : hi;
  }
  for (; i < n; ++i) {
    lo = (v[i] < lo) ? v[i] : lo;
    hi = (hi < v[i]) ? v[i] : hi;
  }
  return {lo, hi};
}

}  // namespace

const KernelOps& avx2_ops() noexcept {
  static const KernelOps ops{power_estimate_avx2, multiply_avx2, minmax_avx2};
  return ops;
}

}  // namespace streamwatt::kernels

#endif  // STREAMWATT_HAVE_AVX2
