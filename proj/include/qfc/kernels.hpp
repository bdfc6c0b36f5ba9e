#pragma once

// Dense and gather arithmetic used by model scoring, the optimizer, and the
// bootstrap. Each kernel has a scalar reference and an AVX2+FMA variant; the
// variant is chosen once at startup from CPUID and can be pinned with
// QFC_FORCE_SCALAR=1 or force_isa() for equivalence testing.
//
// Variants may differ in the last bits (summation order); on one machine
// the choice is fixed, so results are reproducible run to run.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace qfc::kernels {

enum class Isa { scalar, avx2 };

Isa active_isa() noexcept;
std::string_view isa_name(Isa isa) noexcept;
/// True when the CPU (and build) support the AVX2 path.
bool avx2_available() noexcept;
/// Pins the dispatch table. Requesting avx2 on a machine without it is a no-op
/// that returns false.
bool force_isa(Isa isa) noexcept;

double dot(std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
/// Σ w[idx[i]] * vals[i]
double gather_dot(std::span<const double> w, std::span<const std::uint32_t> idx, std::span<const double> vals);
/// Σ x[idx[i]]
double gather_sum(std::span<const double> x, std::span<const std::uint32_t> idx);

// Raw entry points, exposed for equivalence tests and benchmarks.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
double gather_dot(const double* w, const std::uint32_t* idx, const double* vals, std::size_t n);
double gather_sum(const double* x, const std::uint32_t* idx, std::size_t n);
}  // namespace scalar

#if defined(QFC_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
double gather_dot(const double* w, const std::uint32_t* idx, const double* vals, std::size_t n);
double gather_sum(const double* x, const std::uint32_t* idx, std::size_t n);
}  // namespace avx2
#endif

}  // namespace qfc::kernels
