#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "fdirnet/errors.hpp"
#include "fdirnet/kernels.hpp"

namespace fdirnet::kernels {

#ifndef FDIRNET_HAVE_AVX2
// Non-x86 builds: keep the symbols so equivalence tests link; never selected.
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept { return scalar::dot(a, b, n); }
double squared_norm(const double* x, std::size_t n) noexcept { return scalar::squared_norm(x, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept { scalar::axpy(alpha, x, y, n); }
void gemv(std::size_t r, std::size_t c, const double* a, const double* x, double* y) noexcept {
  scalar::gemv(r, c, a, x, y);
}
void gemv_t(std::size_t r, std::size_t c, const double* a, const double* x, double* y) noexcept {
  scalar::gemv_t(r, c, a, x, y);
}
}  // namespace avx2
#endif

namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t) noexcept;
  double (*squared_norm)(const double*, std::size_t) noexcept;
  void (*axpy)(double, const double*, double*, std::size_t) noexcept;
  void (*gemv)(std::size_t, std::size_t, const double*, const double*, double*) noexcept;
  void (*gemv_t)(std::size_t, std::size_t, const double*, const double*, double*) noexcept;
  Backend backend;
};

constexpr Table kScalar{&scalar::dot, &scalar::squared_norm, &scalar::axpy,
                        &scalar::gemv, &scalar::gemv_t, Backend::Scalar};
constexpr Table kAvx2{&avx2::dot, &avx2::squared_norm, &avx2::axpy,
                      &avx2::gemv, &avx2::gemv_t, Backend::Avx2};

bool cpu_has_avx2() noexcept {
#if defined(FDIRNET_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* initial_table() noexcept {
  const char* env = std::getenv("FDIRNET_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return &kScalar;
  return cpu_has_avx2() ? &kAvx2 : &kScalar;
}

std::atomic<const Table*>& table() noexcept {
  static std::atomic<const Table*> t{initial_table()};
  return t;
}

inline const Table& active() noexcept { return *table().load(std::memory_order_relaxed); }

void check_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw InvalidArgument(std::string("kernels: size mismatch in ") + what);
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

bool avx2_available() noexcept {
  static const bool has = cpu_has_avx2();
  return has;
}

Backend active_backend() noexcept { return active().backend; }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_available()) {
    throw InvalidArgument("kernels: AVX2 backend not available on this machine");
  }
  table().store(b == Backend::Avx2 ? &kAvx2 : &kScalar, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_same(a.size(), b.size(), "dot");
  return active().dot(a.data(), b.data(), a.size());
}

double squared_norm(std::span<const double> x) {
  return active().squared_norm(x.data(), x.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_same(x.size(), y.size(), "axpy");
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void gemv(std::size_t rows, std::size_t cols, std::span<const double> a,
          std::span<const double> x, std::span<double> y) {
  check_same(a.size(), rows * cols, "gemv(A)");
  check_same(x.size(), cols, "gemv(x)");
  check_same(y.size(), rows, "gemv(y)");
  active().gemv(rows, cols, a.data(), x.data(), y.data());
}

void gemv_t(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> y) {
  check_same(a.size(), rows * cols, "gemv_t(A)");
  check_same(x.size(), rows, "gemv_t(x)");
  check_same(y.size(), cols, "gemv_t(y)");
  active().gemv_t(rows, cols, a.data(), x.data(), y.data());
}

void gemv(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  y.resize(a.rows());
  gemv(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()), view(a), view(x),
       view(y));
}

void gemv_t(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  y.resize(a.cols());
  gemv_t(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()), view(a), view(x),
         view(y));
}

double norm(const Eigen::VectorXd& x) { return std::sqrt(squared_norm(view(x))); }

}  // namespace fdirnet::kernels
