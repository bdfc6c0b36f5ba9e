#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qfc/kernels.hpp"

using namespace qfc::kernels;

namespace {

std::vector<double> randvec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 3.0);
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

double abs_sum(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] * b[i]);
  return s;
}

}  // namespace

TEST_CASE("scalar kernels on hand examples") {
  const double a[] = {1, 2, 3}, b[] = {4, 5, 6};
  CHECK(scalar::dot(a, b, 3) == 32.0);
  double y[] = {1, 1, 1};
  scalar::axpy(2.0, a, y, 3);
  CHECK(y[2] == 7.0);
  scalar::scale(0.5, y, 3);
  CHECK(y[0] == 1.5);
  const std::uint32_t idx[] = {2, 0, 2};
  const double vals[] = {1.0, 10.0, -1.0};
  CHECK(scalar::gather_dot(b, idx, vals, 3) == 40.0);
  CHECK(scalar::gather_sum(b, idx, 3) == 16.0);
  CHECK(scalar::dot(a, b, 0) == 0.0);
}

TEST_CASE("dispatch can be pinned to the scalar path") {
  const Isa before = active_isa();
  CHECK(force_isa(Isa::scalar));
  CHECK(active_isa() == Isa::scalar);
  CHECK(isa_name(Isa::scalar) == "scalar");
  if (avx2_available()) {
    CHECK(force_isa(Isa::avx2));
    CHECK(active_isa() == Isa::avx2);
  } else {
    CHECK_FALSE(force_isa(Isa::avx2));
  }
  force_isa(before);
}

#if defined(QFC_HAVE_AVX2)
TEST_CASE("AVX2 kernels agree with the scalar reference") {
  if (!avx2_available()) {
    MESSAGE("CPU lacks AVX2; skipping");
    return;
  }
  std::mt19937_64 rng(42);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 33u, 100u, 1023u, 4096u}) {
    const auto a = randvec(n, rng), b = randvec(n, rng);
    const double tol = 1e-13 * (1.0 + abs_sum(a, b));
    CHECK(std::abs(avx2::dot(a.data(), b.data(), n) - scalar::dot(a.data(), b.data(), n)) <= tol);

    auto y1 = b, y2 = b;
    scalar::axpy(-0.7, a.data(), y1.data(), n);
    avx2::axpy(-0.7, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-14 * (1.0 + std::abs(y1[i])));

    auto z1 = a, z2 = a;
    scalar::scale(1.3, z1.data(), n);
    avx2::scale(1.3, z2.data(), n);
    CHECK(z1 == z2);

    const auto w = randvec(5000, rng);
    std::vector<std::uint32_t> idx(n);
    for (auto& i : idx) i = static_cast<std::uint32_t>(rng() % w.size());
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(w[idx[i]] * a[i]);
    CHECK(std::abs(avx2::gather_dot(w.data(), idx.data(), a.data(), n) -
                   scalar::gather_dot(w.data(), idx.data(), a.data(), n)) <= 1e-13 * (1.0 + mag));
    double smag = 0.0;
    for (std::size_t i = 0; i < n; ++i) smag += std::abs(w[idx[i]]);
    CHECK(std::abs(avx2::gather_sum(w.data(), idx.data(), n) - scalar::gather_sum(w.data(), idx.data(), n)) <=
          1e-13 * (1.0 + smag));
  }
}
#endif

TEST_CASE("span entry points follow the active variant") {
  std::mt19937_64 rng(3);
  const auto a = randvec(257, rng), b = randvec(257, rng);
  const Isa before = active_isa();
  force_isa(Isa::scalar);
  const double s = dot(a, b);
  CHECK(s == scalar::dot(a.data(), b.data(), a.size()));
  force_isa(Isa::avx2);
  CHECK(std::abs(dot(a, b) - s) <= 1e-12 * (1.0 + abs_sum(a, b)));
  force_isa(before);
}
