#include "fdirnet/kernels.hpp"

namespace fdirnet::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(const double* x, std::size_t n) noexcept { return dot(x, x, n); }

void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(std::size_t rows, std::size_t cols, const double* a, const double* x, double* y) noexcept {
  for (std::size_t r = 0; r < rows; ++r) y[r] = 0.0;
  for (std::size_t c = 0; c < cols; ++c) axpy(x[c], a + c * rows, y, rows);
}

void gemv_t(std::size_t rows, std::size_t cols, const double* a, const double* x, double* y) noexcept {
  for (std::size_t c = 0; c < cols; ++c) y[c] = dot(a + c * rows, x, rows);
}

}  // namespace fdirnet::kernels::scalar
