#include <doctest.h>

#include <cmath>

#include "aopsic/error.hpp"
#include "aopsic/moments.hpp"

using namespace aopsic;

namespace {

void check_values(const MomentVector& mu, std::vector<double> expected, double rel = 1e-12) {
  REQUIRE(mu.values().size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(mu.values()[i] == doctest::Approx(expected[i]).epsilon(rel));
}

void check_cauchy_schwarz(const MomentVector& mu) {
  // E|x|^{2a} E|x|^{2b} >= (E|x|^{a+b})^2 on the even grid.
  const auto n = mu.max_index();
  for (std::size_t a = 1; a <= n; ++a)
    for (std::size_t b = a; b <= n; ++b)
      if ((a + b) % 2 == 0) {
        const double mid = mu.at((a + b) / 2);
        CHECK(mu.at(a) * mu.at(b) >= mid * mid * (1 - 1e-12));
      }
}

}  // namespace

TEST_CASE("estimate_moments") {
  const auto c4 = qam_constellation(4);
  check_values(estimate_moments(c4, 4, MomentKind::EvenOnly), {1, 1, 1, 1});
  check_values(estimate_moments(ComplexVec{Complex(2, 0)}, 2, MomentKind::EvenOnly), {4, 16});
  check_values(estimate_moments(ComplexVec{Complex(0, 2)}, 3, MomentKind::AllOrders), {2, 4, 8});
  CHECK_THROWS_AS(estimate_moments(ComplexVec{}, 2, MomentKind::EvenOnly), Error);

  Rng rng({1, 0});
  const auto x = rng_complex_gaussian(rng, 1000000, 1.0);
  check_values(estimate_moments(x, 3, MomentKind::EvenOnly), {1, 2, 6}, 0.02);
}

TEST_CASE("estimate_moments standard error halves when the sample count quadruples") {
  // Doubling N shrinks the standard error by sqrt(2); quadrupling halves it.
  double err_small = 0, err_large = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng({100 + s, 0});
    const auto a = rng_complex_gaussian(rng, 4000, 1.0);
    const auto b = rng_complex_gaussian(rng, 16000, 1.0);
    err_small += std::pow(estimate_moments(a, 2, MomentKind::EvenOnly).at(2) - 2.0, 2);
    err_large += std::pow(estimate_moments(b, 2, MomentKind::EvenOnly).at(2) - 2.0, 2);
  }
  const double ratio = std::sqrt(err_small / err_large);
  CHECK(ratio > 1.4);
  CHECK(ratio < 2.9);
}

TEST_CASE("gaussian_moments") {
  check_values(gaussian_moments(1, 6), {1, 2, 6, 24, 120, 720});
  check_values(gaussian_moments(4, 2), {4, 32});
  check_values(gaussian_moments(2.5, 1), {2.5});
  CHECK_THROWS_AS(gaussian_moments(0, 2), Error);
  check_cauchy_schwarz(gaussian_moments(1.7, 8));

  Rng rng({2, 0});
  const auto x = rng_complex_gaussian(rng, 1000000, 4.0);
  check_values(estimate_moments(x, 2, MomentKind::EvenOnly), {4, 32}, 0.02);
}

TEST_CASE("uniform_moments") {
  check_values(uniform_moments(1, 5), {1.0 / 3, 1.0 / 5, 1.0 / 7, 1.0 / 9, 1.0 / 11});
  check_values(uniform_moments(2, 1), {4.0 / 3});
  check_cauchy_schwarz(uniform_moments(1.3, 8));
  Rng rng({3, 0});
  ComplexVec x(1000000);
  for (auto& v : x) v = rng.uniform(-1, 1);
  check_values(estimate_moments(x, 3, MomentKind::EvenOnly), {1.0 / 3, 1.0 / 5, 1.0 / 7}, 0.02);
}

TEST_CASE("exponential_moments") {
  check_values(exponential_moments(1, 3, MomentKind::EvenOnly), {2, 24, 720});
  check_values(exponential_moments(1, 4, MomentKind::AllOrders), {1, 2, 6, 24});
  check_values(exponential_moments(2, 2, MomentKind::AllOrders), {0.5, 0.5});
  check_cauchy_schwarz(exponential_moments(0.7, 6, MomentKind::EvenOnly));
  Rng rng({4, 0});
  ComplexVec x(1000000);
  for (auto& v : x) v = -std::log1p(-rng.uniform()) / 2.0;
  check_values(estimate_moments(x, 2, MomentKind::AllOrders), {0.5, 0.5}, 0.02);
}

TEST_CASE("qam_moments") {
  check_values(qam_moments(qam_constellation(16), 4), {1, 1.32, 1.96, 3.1248}, 1e-12);
  const auto m64 = qam_moments(qam_constellation(64), 4);
  CHECK(m64.at(2) == doctest::Approx(1.381).epsilon(1e-4));
  CHECK(m64.at(3) == doctest::Approx(2.2258).epsilon(1e-4));
  CHECK(m64.at(4) == doctest::Approx(3.9630).epsilon(1e-4));
  check_values(qam_moments(qam_constellation(4), 4), {1, 1, 1, 1});
  CHECK_THROWS_AS(qam_moments(ComplexVec{}, 2), Error);
  try {
    qam_moments(ComplexVec{}, 2);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyConstellation);
  }
  for (int order : {4, 16, 64, 256}) {
    const auto mu = qam_moments(qam_constellation(order), 6);
    CHECK(std::abs(mu.at(1) - 1.0) < 1e-12);
    check_cauchy_schwarz(mu);
  }
}

TEST_CASE("16QAM closed form matches the constellation average") {
  const auto mu = qam_moments(qam_constellation(16), 4);
  for (int k = 1; k <= 4; ++k) {
    const double closed = (4 * std::pow(18, k) + 4 * std::pow(2, k) + 8 * std::pow(10, k)) / (16 * std::pow(10, k));
    CHECK(mu.at(static_cast<std::size_t>(k)) == doctest::Approx(closed).epsilon(1e-13));
  }
}

TEST_CASE("64QAM closed form matches the constellation average") {
  const auto mu = qam_moments(qam_constellation(64), 5);
  for (int k = 1; k <= 5; ++k) {
    auto p = [k](double b) { return std::pow(b, k); };
    const double closed =
        (4 * (p(2) + p(18) + p(98)) + 12 * p(50) + 8 * (p(10) + p(26) + p(34) + p(58) + p(74))) / (64 * p(42));
    CHECK(mu.at(static_cast<std::size_t>(k)) == doctest::Approx(closed).epsilon(1e-13));
  }
}

TEST_CASE("qam constellations are gray mapped and unit power") {
  for (int order : {4, 16, 64, 256}) {
    const auto c = qam_constellation(order);
    CHECK(c.size() == static_cast<std::size_t>(order));
    double p = 0;
    for (const auto& v : c) p += std::norm(v);
    CHECK(p / order == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto q4 = qam_constellation(4);
  for (const auto& v : q4) CHECK(std::abs(std::abs(v.real()) - M_SQRT1_2) < 1e-15);
  CHECK_THROWS_AS(qam_constellation(8), Error);
}

TEST_CASE("scale_moments") {
  check_values(scale_moments(MomentVector(MomentKind::EvenOnly, {1, 2, 6}), 2), {4, 32, 384});
  check_values(scale_moments(gaussian_moments(1, 3), 1), {1, 2, 6});
  const auto a = scale_moments(gaussian_moments(1.5, 5), std::sqrt(3.0));
  const auto b = gaussian_moments(4.5, 5);
  for (std::size_t m = 1; m <= 5; ++m) CHECK(a.at(m) == doctest::Approx(b.at(m)).epsilon(1e-12));
  check_values(scale_moments(MomentVector(MomentKind::AllOrders, {1, 2}), 3), {3, 18});
}

TEST_CASE("MomentVector indexing") {
  const MomentVector even(MomentKind::EvenOnly, {1, 2, 6});
  CHECK(even.hankel_entry(0) == 1);
  CHECK(even.hankel_entry(2) == 6);
  CHECK(even.hankel_extent() == 2);
  CHECK_THROWS_AS(even.at(4), Error);
  const MomentVector all(MomentKind::AllOrders, {1, 2});
  CHECK(all.hankel_entry(0) == 1);
  CHECK(all.hankel_entry(2) == 2);
  CHECK(all.hankel_extent() == 2);
  CHECK_THROWS_AS(MomentVector(MomentKind::EvenOnly, {-1}), Error);
}
