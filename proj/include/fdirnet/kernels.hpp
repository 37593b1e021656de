#pragma once

// Dense level-1/level-2 kernels used in the solver inner loops.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2+FMA variant. The variant is picked once at startup from CPUID; the
// environment variable FDIRNET_SIMD=scalar forces the reference path. Matrices
// are column-major with leading dimension == rows (Eigen's default layout).

#include <cstddef>
#include <span>
#include <string_view>

#include <Eigen/Dense>

namespace fdirnet::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend b) noexcept;

// True when the CPU and the build both support the AVX2 path.
bool avx2_available() noexcept;

Backend active_backend() noexcept;

// Throws InvalidArgument when selecting Avx2 on a machine without it.
void set_backend(Backend b);

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> x);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// y = A x          (A is rows x cols)
void gemv(std::size_t rows, std::size_t cols, std::span<const double> a,
          std::span<const double> x, std::span<double> y);
// y = A^T x
void gemv_t(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> y);

// Eigen conveniences over the dispatched kernels.
inline std::span<const double> view(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<double> view(Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<const double> view(const Eigen::MatrixXd& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

void gemv(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y);
void gemv_t(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y);
double norm(const Eigen::VectorXd& x);

// Reference and vector implementations, exposed for equivalence testing.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double squared_norm(const double* x, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
void gemv(std::size_t rows, std::size_t cols, const double* a, const double* x, double* y) noexcept;
void gemv_t(std::size_t rows, std::size_t cols, const double* a, const double* x, double* y) noexcept;
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double squared_norm(const double* x, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
void gemv(std::size_t rows, std::size_t cols, const double* a, const double* x, double* y) noexcept;
void gemv_t(std::size_t rows, std::size_t cols, const double* a, const double* x, double* y) noexcept;
}  // namespace avx2

}  // namespace fdirnet::kernels
