#include "doctest.h"

#include <cstring>
#include <vector>

#include "decaylab/kernels.hpp"
#include "support.hpp"

using namespace decaylab;

namespace {

std::vector<double> random_vector(std::mt19937_64& g, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = testing::uniform(g, lo, hi);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("active kernel table honours the override") {
  const auto& t = kernels::active();
  const char* env = std::getenv("DECAYLAB_KERNELS");
  if (env && std::string(env) == "scalar") CHECK(t.name == "scalar");
  if (!kernels::avx2_table()) CHECK(t.name == "scalar");
}

TEST_CASE("scalar reference kernels") {
  const auto& s = kernels::scalar_table();
  const std::vector<double> w{1, 2, 3}, f{4, 5, 6};
  CHECK(s.dot(w.data(), f.data(), 3) == 32.0);
  const std::vector<double> x{3, -1, 7, 2};
  CHECK(s.max_value(x.data(), 4) == 7.0);
  CHECK(s.min_value(x.data(), 4) == -1.0);
  std::vector<double> lo{0, 1, 1, 0}, di{0, -2, -2, 0}, hi{0, 1, 1, 0}, u{0, 1, 4, 9}, out(4, -5);
  s.stencil3(lo.data(), di.data(), hi.data(), u.data(), out.data(), 4);
  CHECK(out[1] == 2.0);
  CHECK(out[2] == 2.0);
  CHECK(out[0] == -5.0);
  CHECK(out[3] == -5.0);
}

TEST_CASE("AVX2 kernels match the scalar reference") {
  const auto* v = kernels::avx2_table();
  if (!v) {
    MESSAGE("AVX2 unavailable; equivalence test skipped");
    return;
  }
  const auto& s = kernels::scalar_table();
  auto g = testing::rng("kernels");
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 63u, 64u, 65u, 1000u, 4001u}) {
    CAPTURE(n);
    const auto w = random_vector(g, n, 0.0, 1.0);
    const auto f = random_vector(g, n, -1.0, 1.0);
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) abs_sum += std::abs(w[i] * f[i]);
    CHECK(std::abs(s.dot(w.data(), f.data(), n) - v->dot(w.data(), f.data(), n)) <= 1e-15 * abs_sum * n);
    CHECK(s.max_value(f.data(), n) == v->max_value(f.data(), n));
    CHECK(s.min_value(f.data(), n) == v->min_value(f.data(), n));

    if (n < 3) continue;
    const auto lo = random_vector(g, n, 0.0, 2.0), di = random_vector(g, n, -4.0, 0.0);
    const auto hi = random_vector(g, n, 0.0, 2.0), u = random_vector(g, n, 0.0, 1.0);
    std::vector<double> o1(n, 0.0), o2(n, 0.0);
    s.stencil3(lo.data(), di.data(), hi.data(), u.data(), o1.data(), n);
    v->stencil3(lo.data(), di.data(), hi.data(), u.data(), o2.data(), n);
    CHECK(bitwise_equal(o1, o2));

    const auto diff = random_vector(g, n, 0.0, 3.0);
    const double dt = testing::log_uniform(g, 1e-6, 10.0);
    std::vector<double> a1(n), b1(n), c1(n), a2(n), b2(n), c2(n);
    s.implicit_rows(diff.data(), dt, lo.data(), di.data(), hi.data(), a1.data(), b1.data(), c1.data(), n);
    v->implicit_rows(diff.data(), dt, lo.data(), di.data(), hi.data(), a2.data(), b2.data(), c2.data(), n);
    CHECK(bitwise_equal(a1, a2));
    CHECK(bitwise_equal(b1, b2));
    CHECK(bitwise_equal(c1, c2));
  }
}

TEST_CASE("AVX2 reductions handle signed zeros and extremes like the scalar path") {
  const auto* v = kernels::avx2_table();
  if (!v) return;
  const auto& s = kernels::scalar_table();
  const std::vector<double> x{1e-300, -0.0, 0.0, 1e300, -1e300, 5.0, 6.0, 7.0, 8.0};
  CHECK(s.max_value(x.data(), x.size()) == v->max_value(x.data(), x.size()));
  CHECK(s.min_value(x.data(), x.size()) == v->min_value(x.data(), x.size()));
}
