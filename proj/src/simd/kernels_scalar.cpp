#include <cmath>

#include "sopool/simd.hpp"

namespace sopool::simd {
namespace {

constexpr std::size_t kLanes = 16;

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc[kLanes] = {};
  const std::size_t body = n - n % kLanes;
  for (std::size_t i = 0; i < body; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) acc[l] = std::fma(a[i + l], b[i + l], acc[l]);
  }
  for (std::size_t width = kLanes / 2; width >= 1; width /= 2) {
    for (std::size_t l = 0; l < width; ++l) acc[l] += acc[l + width];
  }
  double sum = acc[0];
  for (std::size_t i = body; i < n; ++i) sum = std::fma(a[i], b[i], sum);
  return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void rot_scalar(double* x, double* y, std::size_t n, double c, double s) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = std::fma(c, xi, -(s * yi));
    y[i] = std::fma(s, xi, c * yi);
  }
}

void scale_scalar(double* x, std::size_t n, double alpha) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", dot_scalar, axpy_scalar, rot_scalar, scale_scalar,
                                 mul_scalar};
  return table;
}

}  // namespace sopool::simd
