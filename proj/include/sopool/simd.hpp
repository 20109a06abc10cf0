#pragma once

#include <cstddef>
#include <string_view>

namespace sopool::simd {

// Arithmetic inner loops used by the dense kernels. Every variant must follow
// the same per-element operation order so that results are bit-identical
// across variants:
//
//   dot   : 16 partial sums, lane l accumulates indices i with i % 16 == l
//           using fma; the 16 lanes are reduced as a pairwise tree
//           (l, l+8) -> (l, l+4) -> (l, l+2) -> (l, l+1); the tail (n % 16
//           elements) is then folded in sequentially with fma.
//   axpy  : y[i] = fma(alpha, x[i], y[i])
//   rot   : x' = fma(c, x, -(s * y)),  y' = fma(s, x, c * y)
//   scale : x[i] *= alpha
//   mul   : out[i] = a[i] * b[i]
struct KernelTable {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*rot)(double* x, double* y, std::size_t n, double c, double s);
  void (*scale)(double* x, std::size_t n, double alpha);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// Kernel table picked at first use: AVX2 when available unless the
/// environment variable SOPOOL_SIMD=scalar forces the reference kernels.
const KernelTable& active();

/// Overrides the active table (tests, benchmarks). Not thread-safe with
/// concurrent kernel calls.
void set_active(const KernelTable& table);

}  // namespace sopool::simd
