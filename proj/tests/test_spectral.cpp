#include <cmath>
#include <numbers>

#include "doctest.h"
#include "exlab/spectral.hpp"
#include "oracles.hpp"

using namespace exlab;
using std::numbers::pi;

TEST_CASE("legendre_p examples") {
  CHECK(legendre_p(0, 0.3) == 1.0);
  CHECK(legendre_p(7, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(legendre_p(2, 0.0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK_THROWS_AS(legendre_p(3, 1.1), DomainError);
  CHECK_NOTHROW(legendre_p(3, 1.0 + 1e-13));
}

TEST_CASE("legendre_p matches the Laplace-integral oracle") {
  for (int ell : {1, 5, 17, 64, 200})
    for (double x : {-0.97, -0.4, 0.0, 0.31, 0.88, 0.999})
      CHECK(legendre_p(ell, x) == doctest::Approx(static_cast<double>(oracle::legendre(ell, x))).epsilon(1e-11));
}

TEST_CASE("legendre_p is bounded by one") {
  for (int ell = 0; ell <= 512; ell += 7)
    for (int k = -100; k <= 100; ++k) CHECK(std::abs(legendre_p(ell, k / 100.0)) <= 1.0 + 1e-12);
}

TEST_CASE("jacobi_p10 examples and oracle") {
  CHECK(jacobi_p10(0, 0.4) == 1.0);
  CHECK(jacobi_p10(1, 0.0) == doctest::Approx(0.5));
  CHECK(jacobi_p10(1, 1.0) == doctest::Approx(2.0));
  for (int n : {2, 3, 8, 20})
    for (double x : {-0.9, -0.2, 0.5, 1.0})
      CHECK(jacobi_p10(n, x) == doctest::Approx(static_cast<double>(oracle::jacobi10(n, x))).epsilon(1e-11));
  for (int n = 0; n < 40; ++n) CHECK(jacobi_p10(n, 1.0) == doctest::Approx(n + 1.0).epsilon(1e-13));
}

TEST_CASE("Christoffel-Darboux summation identity") {
  for (int ell = 0; ell <= 256; ell += 16) {
    for (int k = 0; k <= 40; ++k) {
      const double x = std::cos(pi * k / 40.0);
      CompensatedSum<double> acc;
      const auto p = legendre_table<double>(ell, x);
      for (int j = 0; j <= ell; ++j) acc.add(legendre_weight(j) * p[j]);
      const double rhs = (ell + 1.0) / (4.0 * pi) * jacobi_p10(ell, x);
      CHECK(std::abs(acc.value() - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("kostlan_kernel examples") {
  CHECK(kostlan_kernel(10, 0.0) == 1.0);
  CHECK(kostlan_kernel(2, pi / 2) == 0.0);
  CHECK(kostlan_kernel(1, pi / 2) == 0.0);
  const double v = kostlan_kernel(64, 0.5);
  CHECK(v == doctest::Approx(std::pow(std::cos(0.5), 64)).epsilon(1e-12));
  CHECK(std::abs(v) <= std::exp(-0.25 * 64 / 4));
  CHECK(kostlan_kernel(2000, 1.5) >= 0.0);
}

TEST_CASE("kostlan_kernel reflection symmetry") {
  for (int n : {1, 2, 7, 64, 129})
    for (double th : {0.05, 0.4, 1.0, 1.3}) {
      const double a = kostlan_kernel(n, th), b = kostlan_kernel(n, pi - th);
      CHECK(std::signbit(b) == ((n % 2 == 1) ? !std::signbit(a) : std::signbit(a)));
      CHECK(std::abs(std::abs(a) - std::abs(b)) <= 1e-15);
    }
}

TEST_CASE("bandlimited_kernel examples") {
  for (double alpha : {0.0, 0.5})
    for (int ell : {1, 8, 64, 256}) CHECK(std::abs(bandlimited_kernel(KernelSpec::bandlimited(alpha, ell), 0.0) - 1.0) <= 1e-12);
  CHECK(std::abs(bandlimited_kernel(KernelSpec::mono(0.5, 100), 0.0) - 1.0) <= 1e-12);

  const auto s1 = KernelSpec::bandlimited(0.0, 1);
  const double c1 = s1.normalizing_constant_sq();
  for (double th : {0.2, 1.0, 2.5}) {
    const double x = std::cos(th);
    CHECK(bandlimited_kernel(s1, th) == doctest::Approx((1.0 + 3.0 * x) / (4.0 * pi) * c1).epsilon(1e-13));
  }

  const auto s = KernelSpec::bandlimited(0.5, 128);
  const double ref = static_cast<double>(oracle::windowed_kernel(64, 128, std::cos(0.3L)));
  CHECK(bandlimited_kernel(s, 0.3) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("kernel specs") {
  CHECK(KernelSpec::bandlimited(0.5, 64).window_low() == 32);
  CHECK(KernelSpec::mono(0.5, 100).window_low() == 90);
  CHECK(KernelSpec::bandlimited(0.5, 64).window_exponent() == 1.0);
  CHECK(KernelSpec::mono(0.3, 64).window_exponent() == 0.3);
  CHECK_THROWS_AS(KernelSpec::kostlan(0), DomainError);
  CHECK_THROWS(bandlimited_kernel(KernelSpec::legendre(4), 0.1));
}

TEST_CASE("kernel_bound_report") {
  std::vector<double> grid;
  for (int i = 1; i <= 50; ++i) grid.push_back(i * (pi / 2) / 50);
  const auto rep = kernel_bound_report(KernelSpec::kostlan(128), grid);
  CHECK(rep.pass);
  CHECK(rep.worst_margin >= 0.0);

  std::vector<double> small{1e-3, 1e-2, 0.1};
  CHECK(kernel_bound_report(KernelSpec::kostlan(1), small).pass);

  std::vector<double> g2;
  for (int i = 1; i <= 200; ++i) g2.push_back(0.05 + i * (pi / 2 - 0.05) / 200);
  const auto a = kernel_bound_report(KernelSpec::legendre(64), g2);
  const auto b = kernel_bound_report(KernelSpec::legendre(256), g2);
  CHECK(a.empirical_constant / b.empirical_constant < 2.0);
  CHECK(b.empirical_constant / a.empirical_constant < 2.0);
  CHECK_THROWS_AS(kernel_bound_report(KernelSpec::kostlan(4), {0.0}), DomainError);
}

TEST_CASE("zonal coefficients") {
  const auto z = ZonalCoefficients::from_spec(KernelSpec::bandlimited(0.5, 64));
  CHECK(z.total_variance() == doctest::Approx(1.0).epsilon(1e-13));
  for (double th : {0.0, 0.1, 0.7})
    CHECK(z.kernel(th) == doctest::Approx(bandlimited_kernel(KernelSpec::bandlimited(0.5, 64), th)).epsilon(1e-9).scale(1.0));
  CHECK(ZonalCoefficients::rsh(5).kernel(0.4) == doctest::Approx(legendre_p(5, std::cos(0.4))));
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  const auto rule = gauss_legendre(12);
  for (int deg = 0; deg <= 23; ++deg) {
    double acc = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * std::pow(rule.nodes[i], deg);
    const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
    CHECK(acc == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
  }
  const auto r1 = gauss_legendre(1);
  CHECK(r1.weights[0] == doctest::Approx(2.0));
  const auto big = gauss_legendre(2000, 0.0, 1.0);
  double s = 0;
  for (double w : big.weights) s += w;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
}
