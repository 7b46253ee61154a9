#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "aopsic/error.hpp"
#include "aopsic/moments.hpp"
#include "aopsic/orthopoly.hpp"

using namespace aopsic;

namespace {

std::vector<MomentVector> moment_sets(std::size_t k) {
  return {gaussian_moments(1, k),
          uniform_moments(1, k),
          exponential_moments(1, k, MomentKind::EvenOnly),
          qam_moments(qam_constellation(16), k),
          qam_moments(qam_constellation(64), k),
          qam_moments(qam_constellation(256), k)};
}

// Highest order with a nonzero polynomial: 16QAM has three distinct amplitudes.
int top_order(const MomentVector& mu, int want) {
  const bool is16 = std::abs(mu.at(2) - 1.32) < 1e-12;
  return is16 ? std::min(want, 3) : want;
}

void check_coeffs(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= tol);
}

}  // namespace

TEST_CASE("build_hankel") {
  const auto h = build_hankel(gaussian_moments(1, 4), 3);
  CHECK(h(0, 0) == 1);
  CHECK(h(0, 1) == 2);
  CHECK(h(1, 0) == 2);
  CHECK(h(1, 1) == 6);
  const auto mu16 = qam_moments(qam_constellation(16), 4);
  const auto h16 = build_hankel(mu16, 3);
  CHECK(h16(0, 1) == doctest::Approx(1.32));
  CHECK(h16(1, 1) == doctest::Approx(1.96));
  CHECK(build_hankel(gaussian_moments(3, 1), 2)(0, 0) == 3);
  try {
    build_hankel(gaussian_moments(1, 2), 3);
    FAIL("expected InsufficientMoments");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientMoments);
  }
}

TEST_CASE("solve_monic") {
  const auto g = gaussian_moments(1, 6);
  check_coeffs(solve_monic(g, 2), {-2, 1}, 1e-12);
  check_coeffs(solve_monic(g, 3), {6, -6, 1}, 1e-12);
  try {
    solve_monic(qam_moments(qam_constellation(4), 4), 2);
    FAIL("expected RankDeficient");
  } catch (const RankDeficientError& e) {
    CHECK(e.order() == 2);
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
  for (const auto& mu : moment_sets(12))
    for (int p = 1; p <= top_order(mu, 6); ++p) CHECK(solve_monic(mu, p).back() == 1.0);
  CHECK_THROWS_AS(solve_monic(qam_moments(qam_constellation(16), 12), 4), RankDeficientError);
}

TEST_CASE("normalize") {
  const auto g = gaussian_moments(1, 6);
  CHECK(norm_squared(std::vector<double>{-2, 1}, g) == doctest::Approx(2));
  check_coeffs(normalize(std::vector<double>{-2, 1}, g), {-std::sqrt(2.0), 1 / std::sqrt(2.0)}, 1e-14);
  CHECK(norm_squared(std::vector<double>{-1.32, 1}, qam_moments(qam_constellation(16), 4)) ==
        doctest::Approx(0.2176).epsilon(1e-12));
  CHECK(norm_squared(std::vector<double>{6, -6, 1}, g) == doctest::Approx(12).epsilon(1e-14));
  CHECK_THROWS_AS(normalize(std::vector<double>{-1, 1}, qam_moments(qam_constellation(4), 4)), Error);
}

TEST_CASE("schur_extend matches direct inversion") {
  const auto g = gaussian_moments(1, 12);
  const auto base = hankel_base(g);
  CHECK(base.inverse(0, 0) == 1.0);
  const auto s3 = schur_extend(base, g);
  const auto direct = invert_symmetric(build_hankel(g, 3));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(s3.inverse(i, j) - direct(i, j)) < 1e-12);

  for (const auto& mu : moment_sets(12)) {
    auto st = hankel_base(mu);
    for (int p = 3; p <= top_order(mu, 6); ++p) {
      st = schur_extend(st, mu);
      CHECK(st.p == p);
      const auto h = build_hankel(mu, p);
      const auto inv = invert_symmetric(h);
      const double scale = inv.max_abs();
      for (std::size_t i = 0; i < h.rows(); ++i)
        for (std::size_t j = 0; j < h.cols(); ++j) CHECK(std::abs(st.inverse(i, j) - inv(i, j)) <= 1e-8 * scale);
    }
  }
}

TEST_CASE("schur pivot equals the monic norm") {
  for (const auto& mu : moment_sets(12)) {
    auto st = hankel_base(mu);
    for (int p = 2; p <= top_order(mu, 6); ++p) {
      st = schur_extend(st, mu);
      CHECK(st.pivot == doctest::Approx(norm_squared(solve_monic(mu, p), mu)).epsilon(1e-8));
    }
  }
}

TEST_CASE("schur_extend detects the 4QAM degeneracy") {
  const auto q = qam_moments(qam_constellation(4), 6);
  try {
    schur_extend(hankel_base(q), q);
    FAIL("expected RankDeficient");
  } catch (const RankDeficientError& e) {
    CHECK(e.order() == 2);
  }
}

TEST_CASE("schur_extend work grows quadratically") {
  const auto g = gaussian_moments(1, 40);
  auto st = hankel_base(g);
  std::vector<std::uint64_t> flops;
  for (int p = 3; p <= 12; ++p) {
    st = schur_extend(st, g);
    flops.push_back(st.flops);
    const auto n = static_cast<std::uint64_t>(p - 2);
    CHECK(st.flops == 2 * n * n + 2 * n);  // one mat-vec, one rank-1 update, two dot/scale passes
    CHECK(st.flops <= 3 * static_cast<std::uint64_t>(p) * static_cast<std::uint64_t>(p));
  }
}

TEST_CASE("build_basis Gaussian") {
  const auto b = build_basis(gaussian_moments(1, 5), 5);
  CHECK(b.effective_rank == 3);
  check_coeffs(b.coeffs[0], {1}, 1e-10);
  check_coeffs(b.coeffs[1], {-2 / std::sqrt(2.0), 1 / std::sqrt(2.0)}, 1e-10);
  check_coeffs(b.coeffs[2], {6 / std::sqrt(12.0), -6 / std::sqrt(12.0), 1 / std::sqrt(12.0)}, 1e-10);
}

TEST_CASE("build_basis uniform") {
  const auto b = build_basis(uniform_moments(1, 5), 5);
  REQUIRE(b.effective_rank == 3);
  const double s3 = std::sqrt(3.0), s74 = std::sqrt(7.0 / 4), s1164 = std::sqrt(11.0 / 64);
  auto rel = [](double got, double want) { return std::abs(got - want) <= 1e-8 * std::abs(want); };
  CHECK(rel(b.coeffs[0][0], s3));
  CHECK(rel(b.coeffs[1][0], -3 * s74));
  CHECK(rel(b.coeffs[1][1], 5 * s74));
  CHECK(rel(b.coeffs[2][0], 15 * s1164));
  CHECK(rel(b.coeffs[2][1], -70 * s1164));
  CHECK(rel(b.coeffs[2][2], 63 * s1164));
}

TEST_CASE("build_basis exponential even moments") {
  const auto mu = exponential_moments(1, 5, MomentKind::EvenOnly);
  const auto b = build_basis(mu, 5);
  REQUIRE(b.effective_rank == 3);
  check_coeffs(b.monic[1], {-12, 1}, 1e-9);
  CHECK(b.norm_sq[1] == doctest::Approx(432).epsilon(1e-8));
  CHECK(b.monic[2][0] == doctest::Approx(520).epsilon(1e-8));
  CHECK(b.monic[2][1] == doctest::Approx(-220.0 / 3).epsilon(1e-8));
  CHECK(b.norm_sq[2] / 1600.0 == doctest::Approx(654).epsilon(1e-8));
}

TEST_CASE("build_basis 4QAM collapses to the linear term") {
  const auto b = build_basis(qam_moments(qam_constellation(4), 7), 7);
  CHECK(b.effective_rank == 1);
  CHECK(b.coeffs.size() == 1);
  check_coeffs(b.coeffs[0], {1}, 1e-15);
}

TEST_CASE("build_basis argument checks") {
  CHECK_THROWS_AS(build_basis(gaussian_moments(1, 6), 4), Error);
  CHECK_THROWS_AS(build_basis(gaussian_moments(1, 2), 5), Error);
  CHECK_THROWS_AS(build_basis(exponential_moments(1, 6, MomentKind::AllOrders), 3), Error);
}

TEST_CASE("build_extended_basis reproduces Laguerre polynomials") {
  const auto b = build_extended_basis(exponential_moments(1, 6, MomentKind::AllOrders), 3);
  REQUIRE(b.effective_rank == 4);
  check_coeffs(b.coeffs[0], {1}, 1e-10);
  check_coeffs(b.coeffs[1], {-1, 1}, 1e-10);
  check_coeffs(b.coeffs[2], {1, -2, 0.5}, 1e-10);
  check_coeffs(b.coeffs[3], {-1, 3, -1.5, 1.0 / 6}, 1e-10);

  // Point mass at c: only the constant survives.
  const double c = 1.7;
  std::vector<double> pm(6);
  for (std::size_t m = 0; m < 6; ++m) pm[m] = std::pow(c, double(m + 1));
  CHECK(build_extended_basis(MomentVector(MomentKind::AllOrders, pm), 3).effective_rank == 1);
}

TEST_CASE("extended basis Monte-Carlo Gram") {
  const auto b = build_extended_basis(exponential_moments(1, 6, MomentKind::AllOrders), 3);
  Rng rng({21, 0});
  const std::size_t n = 1000000;
  std::vector<double> g(16, 0.0);
  ComplexVec v(4);
  for (std::size_t i = 0; i < n; ++i) {
    evaluate_regressor(b, Complex(-std::log1p(-rng.uniform()), 0), v);
    for (int a = 0; a < 4; ++a)
      for (int c = 0; c < 4; ++c) g[a * 4 + c] += (v[a] * std::conj(v[c])).real();
  }
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c) CHECK(std::abs(g[a * 4 + c] / n - (a == c ? 1.0 : 0.0)) <= 0.02);
}

TEST_CASE("analytic Gram is the identity") {
  for (const auto& mu : moment_sets(8)) {
    const auto b = build_basis(mu, 7);
    for (int i = 0; i < b.effective_rank; ++i)
      for (int j = 0; j < b.effective_rank; ++j)
        CHECK(std::abs(inner_product(b.coeffs[i], b.coeffs[j], mu) - (i == j ? 1.0 : 0.0)) <= 1e-10);
  }
}

TEST_CASE("evaluate_regressor") {
  const auto g = build_basis(gaussian_moments(1, 5), 5);
  for (const auto& v : evaluate_regressor(g, 0.0)) CHECK(v == Complex(0.0));
  const auto one = evaluate_regressor(g, 1.0);
  CHECK(std::abs(one[0] - 1.0) < 1e-14);
  CHECK(std::abs(one[1] + 1 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(one[2] - 1 / std::sqrt(12.0)) < 1e-14);

  const auto q = build_basis(qam_moments(qam_constellation(16), 5), 5);
  const auto v = evaluate_regressor(q, 1.0);
  CHECK(v[1].real() == doctest::Approx((1 - 1.32) / std::sqrt(0.2176)).epsilon(1e-10));
  CHECK(v[2].real() == doctest::Approx((1 - 2.4706 + 1.3012) / std::sqrt(0.0542)).epsilon(2e-3));

  // Phase equivariance of the odd family.
  const Complex x(0.3, -1.1);
  const Complex rot = std::polar(1.0, 0.7);
  const auto a = evaluate_regressor(g, x);
  const auto c = evaluate_regressor(g, x * rot);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] * rot - c[i]) < 1e-12);
}

TEST_CASE("change_of_basis") {
  const auto b3 = build_basis(gaussian_moments(1, 3), 3);
  const auto c = change_of_basis(b3);
  CHECK(c(0, 0) == doctest::Approx(1));
  CHECK(c(0, 1) == 0);
  CHECK(c(1, 0) == doctest::Approx(-std::sqrt(2.0)));
  CHECK(c(1, 1) == doctest::Approx(1 / std::sqrt(2.0)));

  const auto b1 = build_basis(gaussian_moments(2.5, 1), 1);
  CHECK(change_of_basis(b1)(0, 0) == doctest::Approx(1 / std::sqrt(2.5)));

  const auto b = build_basis(qam_moments(qam_constellation(64), 7), 7);
  const auto cm = change_of_basis(b);
  double det = 1, expect = 1;
  for (int i = 0; i < b.effective_rank; ++i) {
    det *= cm(i, i);
    expect /= std::sqrt(b.norm_sq[i]);
  }
  CHECK(det == doctest::Approx(expect).epsilon(1e-12));
  CHECK(det != 0.0);

  Rng rng({8, 0});
  ComplexVec mono(4);
  for (int t = 0; t < 100; ++t) {
    const Complex x = rng.complex_normal(1.0);
    evaluate_monomials(BasisFamily::OddOnly, 4, x, mono);
    const auto phi = evaluate_regressor(b, x);
    for (int i = 0; i < 4; ++i) {
      Complex s = 0;
      for (int k = 0; k < 4; ++k) s += cm(i, k) * mono[k];
      CHECK(std::abs(s - phi[i]) < 1e-10 * std::max(1.0, std::abs(phi[i])));
    }
  }
}

TEST_CASE("weights mapped through the change of basis give identical outputs") {
  Rng rng({12, 0});
  const auto b = build_basis(gaussian_moments(1, 7), 7);
  const auto c = change_of_basis(b);
  ComplexVec g(4);
  for (auto& v : g) v = rng.complex_normal(1.0);
  // h = C^{-T} g so that h^H phi = g^H mono.
  ComplexVec h(4);
  for (int i = 3; i >= 0; --i) {
    Complex s = g[i];
    for (int j = i + 1; j < 4; ++j) s -= c(j, i) * h[j];
    h[i] = s / c(i, i);
  }
  ComplexVec mono(4);
  for (int t = 0; t < 200; ++t) {
    const Complex x = rng.complex_normal(1.5);
    evaluate_monomials(BasisFamily::OddOnly, 4, x, mono);
    const auto phi = evaluate_regressor(b, x);
    Complex a = 0, d = 0;
    for (int i = 0; i < 4; ++i) {
      a += std::conj(g[i]) * mono[i];
      d += std::conj(h[i]) * phi[i];
    }
    CHECK(std::abs(a - d) <= 1e-10 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("Gaussian P=5 construction is fast") {
  const auto mu = gaussian_moments(1, 5);
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 100; ++i) (void)build_basis(mu, 5);
  const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 100;
  CHECK(dt < 1e-3);
}

TEST_CASE("validate_basis") {
  auto b = build_basis(gaussian_moments(1, 5), 5);
  CHECK_NOTHROW(validate_basis(b));
  b.coeffs[1][0] *= 1.1;
  CHECK_THROWS_AS(validate_basis(b), Error);
}
