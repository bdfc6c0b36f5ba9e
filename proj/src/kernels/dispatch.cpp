#include <atomic>
#include <cstdlib>
#include <cstring>

#include "qfc/kernels.hpp"

namespace qfc::kernels {

namespace {

struct Table {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  double (*gather_dot)(const double*, const std::uint32_t*, const double*, std::size_t);
  double (*gather_sum)(const double*, const std::uint32_t*, std::size_t);
};

constexpr Table kScalar{Isa::scalar, scalar::dot, scalar::axpy, scalar::scale, scalar::gather_dot, scalar::gather_sum};
#if defined(QFC_HAVE_AVX2)
constexpr Table kAvx2{Isa::avx2, avx2::dot, avx2::axpy, avx2::scale, avx2::gather_dot, avx2::gather_sum};
#endif

bool cpu_has_avx2() noexcept {
#if defined(QFC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* select_default() noexcept {
  const char* env = std::getenv("QFC_FORCE_SCALAR");
  if (env && std::strcmp(env, "0") != 0 && *env != '\0') return &kScalar;
#if defined(QFC_HAVE_AVX2)
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return &kScalar;
}

std::atomic<const Table*>& table() {
  static std::atomic<const Table*> t{select_default()};
  return t;
}

const Table& active() { return *table().load(std::memory_order_acquire); }

}  // namespace

Isa active_isa() noexcept { return active().isa; }

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool avx2_available() noexcept { return cpu_has_avx2(); }

bool force_isa(Isa isa) noexcept {
  if (isa == Isa::scalar) {
    table().store(&kScalar, std::memory_order_release);
    return true;
  }
#if defined(QFC_HAVE_AVX2)
  if (cpu_has_avx2()) {
    table().store(&kAvx2, std::memory_order_release);
    return true;
  }
#endif
  return false;
}

double dot(std::span<const double> a, std::span<const double> b) { return active().dot(a.data(), b.data(), a.size()); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) { active().axpy(alpha, x.data(), y.data(), x.size()); }

void scale(double alpha, std::span<double> x) { active().scale(alpha, x.data(), x.size()); }

double gather_dot(std::span<const double> w, std::span<const std::uint32_t> idx, std::span<const double> vals) {
  return active().gather_dot(w.data(), idx.data(), vals.data(), idx.size());
}

double gather_sum(std::span<const double> x, std::span<const std::uint32_t> idx) {
  return active().gather_sum(x.data(), idx.data(), idx.size());
}

}  // namespace qfc::kernels
