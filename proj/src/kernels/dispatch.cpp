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

#include <atomic>
#include <string>

#include "kernels_impl.hpp"
#include "streamwatt/errors.hpp"

namespace streamwatt::kernels {
namespace {

bool backend_supported(Backend b) noexcept {
  switch (b) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if STREAMWATT_HAVE_AVX2
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case Backend::kNeon:
#if STREAMWATT_HAVE_NEON
      return true;  // baseline on aarch64
#else
      return false;
#endif
  }
  return false;
}

const KernelOps& ops_for(Backend b) noexcept {
  switch (b) {
#if STREAMWATT_HAVE_AVX2
    case Backend::kAvx2:
      return avx2_ops();
#endif
#if STREAMWATT_HAVE_NEON
    case Backend::kNeon:
      return neon_ops();
#endif
    default:
      return scalar_ops();
  }
}

Backend detect_best() noexcept {
  if (backend_supported(Backend::kAvx2)) return Backend::kAvx2;
  if (backend_supported(Backend::kNeon)) return Backend::kNeon;
  return Backend::kScalar;
}

struct Dispatch {
  std::atomic<Backend> backend{detect_best()};
};

Dispatch& dispatch() noexcept {
  static Dispatch d;
  return d;
}

const KernelOps& active_ops() noexcept {
  return ops_for(dispatch().backend.load(std::memory_order_relaxed));
}

}  // namespace

const char* backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "unknown";
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::kScalar};
  if (backend_supported(Backend::kAvx2)) out.push_back(Backend::kAvx2);
  if (backend_supported(Backend::kNeon)) out.push_back(Backend::kNeon);
  return out;
}

Backend active_backend() noexcept {
  return dispatch().backend.load(std::memory_order_relaxed);
}

void use_backend(Backend b) {
  if (!backend_supported(b)) {
    throw Error(ErrorCode::kValidation,
                std::string("kernel backend not available on this machine: ") +
                    backend_name(b));
  }
  dispatch().backend.store(b, std::memory_order_relaxed);
}

void power_estimate(const double* fps, const double* pps,
                    const double* bitrate, const double* online,
                    const PowerCoeffs& coeffs, double* watts, std::size_t n) {
  active_ops().power_estimate(fps, pps, bitrate, online, coeffs, watts, n);
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
  active_ops().multiply(a, b, out, n);
}

MinMax minmax(const double* v, std::size_t n) {
  return active_ops().minmax(v, n);
}

}  // namespace streamwatt::kernels
