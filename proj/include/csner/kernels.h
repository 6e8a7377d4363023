// Copyright 2026 The csner Authors.
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

#ifndef CSNER_KERNELS_H_
#define CSNER_KERNELS_H_

#include <cstddef>

namespace csner {
namespace kernels {

// Dense row-major GEMM accumulating into C:  C(m x n) += op(A) * op(B),
// where op(A) is m x k and op(B) is k x n. A transposed operand is stored
// as its untransposed matrix (k x m for A, n x k for B).
//
// GemmSerial is the reference loop nest. Gemm splits output rows across
// OpenMP threads once the product is large enough; each output element is
// still summed by one thread in the same order, so both produce identical
// bits.
enum class Trans { kNo, kYes };

void GemmSerial(const double *a, Trans ta, const double *b, Trans tb, double *c,
                size_t m, size_t k, size_t n);
void Gemm(const double *a, Trans ta, const double *b, Trans tb, double *c,
          size_t m, size_t k, size_t n);

// Work (m * k * n) above which Gemm goes parallel.
inline constexpr size_t kParallelWork = size_t{1} << 15;

// Number of threads OpenMP would use, or 1 without OpenMP.
int MaxThreads();

}  // namespace kernels
}  // namespace csner

#endif  // CSNER_KERNELS_H_
