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

#include "csner/kernels.h"

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace csner {
namespace kernels {
namespace {

// One output row: c[0..n) += sum_p op(A)[i, p] * op(B)[p, :].
inline void GemmRow(const double *a, Trans ta, const double *b, Trans tb,
                    double *c, size_t i, size_t m, size_t k, size_t n) {
  double *crow = c + i * n;
  if (tb == Trans::kNo) {
    for (size_t p = 0; p < k; ++p) {
      const double av = ta == Trans::kNo ? a[i * k + p] : a[p * m + i];
      if (av == 0.0) continue;
      const double *brow = b + p * n;
      for (size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
    return;
  }
  for (size_t j = 0; j < n; ++j) {
    const double *brow = b + j * k;
    double sum = 0.0;
    if (ta == Trans::kNo) {
      const double *arow = a + i * k;
      for (size_t p = 0; p < k; ++p) sum += arow[p] * brow[p];
    } else {
      for (size_t p = 0; p < k; ++p) sum += a[p * m + i] * brow[p];
    }
    crow[j] += sum;
  }
}

}  // namespace

void GemmSerial(const double *a, Trans ta, const double *b, Trans tb, double *c,
                size_t m, size_t k, size_t n) {
  for (size_t i = 0; i < m; ++i) GemmRow(a, ta, b, tb, c, i, m, k, n);
}

void Gemm(const double *a, Trans ta, const double *b, Trans tb, double *c,
          size_t m, size_t k, size_t n) {
  const bool parallel = m > 1 && m * k * n >= kParallelWork;
  const int64_t rows = static_cast<int64_t>(m);
#pragma omp parallel for schedule(static) if (parallel)
  for (int64_t i = 0; i < rows; ++i) {
    GemmRow(a, ta, b, tb, c, static_cast<size_t>(i), m, k, n);
  }
}

int MaxThreads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace kernels
}  // namespace csner
