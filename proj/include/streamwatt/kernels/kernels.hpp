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
// Batch arithmetic kernels for session scoring. Each kernel has a scalar
// reference implementation and SIMD variants selected at runtime; all
// variants produce bit-identical outputs (same per-element operation order,
// no fma contraction). Inputs must be finite and free of NaN.

#pragma once

#include <cstddef>
#include <vector>

namespace streamwatt::kernels {

enum class Backend {
  kScalar,
  kAvx2,
  kNeon,
};

const char* backend_name(Backend b) noexcept;

// Backends usable on this machine; kScalar is always first.
std::vector<Backend> available_backends();

// Currently selected backend. Defaults to the widest available one.
Backend active_backend() noexcept;

// Selects a backend explicitly (used by the equivalence tests). Throws if
// the backend is not available on this machine.
void use_backend(Backend b);

// Coefficients of the linear power model, in feature order.
struct PowerCoeffs {
  double base;
  double fps;
  double pixels_per_second;
  double bitrate;
  double online;
};

// watts[i] = base + fps_c*fps[i] + pps_c*pps[i] + br_c*bitrate[i]
//          + on_c*online[i], accumulated left to right.
void power_estimate(const double* fps, const double* pps,
                    const double* bitrate, const double* online,
                    const PowerCoeffs& coeffs, double* watts, std::size_t n);

// out[i] = a[i] * b[i]
void multiply(const double* a, const double* b, double* out, std::size_t n);

struct MinMax {
  double min;
  double max;
};

// Range of v[0..n); n must be > 0.
MinMax minmax(const double* v, std::size_t n);

}  // namespace streamwatt::kernels
