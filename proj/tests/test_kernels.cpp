#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <random>
#include <vector>

#include "gdm/kernels.hpp"

using namespace gdm::kernels;

namespace {

std::vector<double> randoms(std::size_t n, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> U(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = U(gen);
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar table sanity") {
  const Table& s = scalar_table();
  std::vector<double> a{1, 2, 3, 4, 5}, b{5, 4, 3, 2, 1};
  CHECK(s.dot(a.data(), b.data(), 5) == 35.0);
  CHECK(s.max_abs_diff(a.data(), b.data(), 5) == 4.0);
  std::vector<double> z{0.0, 1.0};
  s.lft_apply(z.data(), 2, 1, 0, 1, 1);  // z / (z + 1)
  CHECK(z[0] == 0.0);
  CHECK(z[1] == 0.5);
}

TEST_CASE("avx2 kernels match the scalar reference") {
  if (!avx2_available()) {
    MESSAGE("AVX2 unavailable; equivalence test skipped");
    return;
  }
  const Table& s = scalar_table();
  const Table& v = avx2_table();
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 1023u, 4099u}) {
    auto a = randoms(n, 1 + n, -2, 2), b = randoms(n, 2 + n, -2, 2);
    CHECK(s.dot(a.data(), b.data(), n) == v.dot(a.data(), b.data(), n));
    CHECK(s.max_abs_diff(a.data(), b.data(), n) == v.max_abs_diff(a.data(), b.data(), n));

    auto x1 = a, x2 = a;
    s.scale(x1.data(), n, 0.37);
    v.scale(x2.data(), n, 0.37);
    CHECK(same_bits(x1, x2));

    auto z1 = randoms(n, 3 + n, 0, 1), z2 = z1;
    s.lft_apply(z1.data(), n, 0.5, 0.25, -0.5, 1.0);
    v.lft_apply(z2.data(), n, 0.5, 0.25, -0.5, 1.0);
    CHECK(same_bits(z1, z2));

    std::vector<std::int32_t> sym(n);
    std::mt19937 g(static_cast<unsigned>(n));
    for (auto& q : sym) q = static_cast<std::int32_t>(g() % 3);
    double ca[3] = {0.5, 1.0, 0.2}, cb[3] = {0.0, 1.0 / 3, 0.1}, cc[3] = {0.5, 1.0 / 3, -0.2}, cd[3] = {1, 1, 1};
    auto w1 = randoms(n, 4 + n, 0, 1), w2 = w1;
    for (int rep = 0; rep < 5; ++rep) {
      s.lft_apply_select(w1.data(), sym.data(), n, ca, cb, cc, cd);
      v.lft_apply_select(w2.data(), sym.data(), n, ca, cb, cc, cd);
    }
    CHECK(same_bits(w1, w2));

    const std::size_t nodes = 129;
    auto values = randoms(nodes, 5, 0, 2), slopes = randoms(nodes, 6, -1, 1);
    std::vector<std::int32_t> idx(n);
    for (auto& q : idx) q = static_cast<std::int32_t>(g() % (nodes - 1));
    auto w0 = randoms(n, 7, 0, 1), s0 = randoms(n, 8, 0, 1), w1b = randoms(n, 9, 0, 1), s1 = randoms(n, 10, 0, 1);
    HermiteGather hg{n, idx.data(), w0.data(), s0.data(), w1b.data(), s1.data()};
    auto o1 = randoms(n, 11, 0, 1), o2 = o1;
    s.hermite_accumulate(hg, values.data(), slopes.data(), o1.data());
    v.hermite_accumulate(hg, values.data(), slopes.data(), o2.data());
    CHECK(same_bits(o1, o2));
  }
}

TEST_CASE("selection override") {
  force(Isa::Scalar);
  CHECK(active().isa == Isa::Scalar);
  reset_selection();
  if (avx2_available()) {
    force(Isa::Avx2);
    CHECK(active().isa == Isa::Avx2);
  }
  reset_selection();
}
