#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "vecsim/kernels.hpp"
#include "vecsim/rng.hpp"

using namespace vecsim;

namespace {

std::vector<double> random(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = uniform01(rng) * 2.0 - 1.0;
  return v;
}

} // namespace

TEST_CASE("tiled GEMMs match the reference bit for bit") {
  Rng rng(3);
  const int shapes[][3] = {{1, 1, 1}, {7, 5, 3}, {64, 330, 256}, {33, 257, 65}, {512, 256, 10}};
  for (const auto& s : shapes) {
    const int m = s[0], k = s[1], n = s[2];
    const auto a = random(rng, static_cast<std::size_t>(m) * k);
    const auto b = random(rng, static_cast<std::size_t>(k) * n);
    auto c0 = random(rng, static_cast<std::size_t>(m) * n);
    auto c1 = c0;
    kernels::gemm_nn(a.data(), b.data(), c0.data(), m, k, n);
    kernels::gemm_nn_ref(a.data(), b.data(), c1.data(), m, k, n);
    CHECK(c0 == c1);

    const auto bt = random(rng, static_cast<std::size_t>(m) * n);
    std::vector<double> d0(static_cast<std::size_t>(k) * n, 0.0), d1 = d0;
    kernels::gemm_tn(a.data(), bt.data(), d0.data(), m, k, n);
    kernels::gemm_tn_ref(a.data(), bt.data(), d1.data(), m, k, n);
    CHECK(d0 == d1);
  }
}

TEST_CASE("GEMM hand example") {
  const double a[] = {1, 2, 3, 4};
  const double b[] = {5, 6, 7, 8};
  double c[] = {1, 0, 0, 0};
  kernels::gemm_nn(a, b, c, 2, 2, 2);
  CHECK(c[0] == 20.0);
  CHECK(c[1] == 22.0);
  CHECK(c[2] == 43.0);
  CHECK(c[3] == 50.0);
  double d[4] = {};
  kernels::gemm_tn(a, b, d, 2, 2, 2);
  CHECK(d[0] == 26.0); // 1*5 + 3*7
  CHECK(d[3] == 44.0); // 2*6 + 4*8
}

TEST_CASE("elementwise helpers") {
  const double bias[] = {1.0, -2.0};
  double y[4];
  kernels::broadcast_rows(bias, y, 2, 2);
  CHECK(y[2] == 1.0);
  CHECK(y[3] == -2.0);
  kernels::relu_inplace(y, 4);
  CHECK(y[1] == 0.0);
  double dy[] = {5, 5, 5, 5};
  kernels::relu_mask(y, dy, 4);
  CHECK(dy[0] == 5.0);
  CHECK(dy[1] == 0.0);
  double col[2] = {};
  const double m[] = {1, 2, 3, 4, 5, 6};
  kernels::column_sums(m, col, 3, 2);
  CHECK(col[0] == 9.0);
  CHECK(col[1] == 12.0);
  double t[6];
  kernels::transpose(m, t, 3, 2);
  CHECK(t[0] == 1.0);
  CHECK(t[1] == 3.0);
  CHECK(t[3] == 2.0);
}
