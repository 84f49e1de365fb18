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

#include <cstddef>

#include "streamwatt/kernels/kernels.hpp"

namespace streamwatt::kernels {

// One function table per backend; dispatch.cpp owns the selection.
struct KernelOps {
  void (*power_estimate)(const double*, const double*, const double*,
                         const double*, const PowerCoeffs&, double*,
                         std::size_t);
  void (*multiply)(const double*, const double*, double*, std::size_t);
  MinMax (*minmax)(const double*, std::size_t);
};

const KernelOps& scalar_ops() noexcept;

#if STREAMWATT_HAVE_AVX2
const KernelOps& avx2_ops() noexcept;
#endif
#if STREAMWATT_HAVE_NEON
const KernelOps& neon_ops() noexcept;
#endif

}  // namespace streamwatt::kernels
