#include <doctest.h>

#include <cmath>
#include <random>

#include "wnls/random.hpp"
#include "wnls/spectral.hpp"

using namespace wnls;

namespace {

// Independent oracle: the convolution sum written out over all (n1, n2, n3).
SpectralField triple_sum(const SpectralField& a, const SpectralField& b, const SpectralField& c) {
  const int N = a.cutoff();
  SpectralField out(N);
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2)
      for (int n3 = -N; n3 <= N; ++n3) {
        const int n = n1 - n2 + n3;
        if (std::abs(n) > N) continue;
        out.at(n) += a.coeff(n1) * std::conj(b.coeff(n2)) * c.coeff(n3);
      }
  return out;
}

SpectralField random_field(std::mt19937_64& rng, int N) {
  std::normal_distribution<double> g;
  SpectralField f(N);
  for (int n = -N; n <= N; ++n) f.at(n) = {g(rng), g(rng)};
  return f;
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("field storage, resize and arithmetic") {
    SpectralField f(3);
    f.set(-3, {1, 2});
    f.set(2, {0, -1});
    CHECK(f.size() == 7);
    CHECK(f.coeff(5) == cplx{});
    CHECK(f.mass() == doctest::Approx(6.0));
    const SpectralField g = f.resized(5).resized(3);
    CHECK(g == f);
    CHECK(f.resized(2).coeff(-3) == cplx{});
    CHECK(l2_distance(f, f.resized(5)) == 0.0);
    const SpectralField h = f + cplx(2.0) * f - f;
    CHECK(max_abs_diff(h, cplx(2.0) * f) < 1e-15);
    CHECK_THROWS(f.at(4));
  }

  TEST_CASE("phase: direct and factorized forms agree, including large modes") {
    std::mt19937_64 rng(3);
    // |n| <= 3 * 18000 keeps every term of Phi inside 64 bits.
    std::uniform_int_distribution<std::int64_t> d(-18000, 18000);
    for (int k = 0; k < 20000; ++k) {
      const auto n1 = d(rng), n2 = d(rng), n3 = d(rng);
      CHECK(phase_phi(n1, n2, n3) == phase_factorized(n1, n2, n3));
    }
    // Hand value: (2, 1, 0) -> n = 1: 16 - 1 + 0 - 1 = 14.
    CHECK(phase_phi(2, 1, 0) == 14);
    CHECK(phase_factorized(2, 1, 0) == 14);
  }

  TEST_CASE("phase vanishes exactly off Gamma") {
    for (int n1 = -6; n1 <= 6; ++n1)
      for (int n2 = -6; n2 <= 6; ++n2) {
        CHECK(phase_phi(n1, n2, n2) == 0);  // n3 = n2 -> n = n1
        CHECK(phase_phi(n1, n1, n2) == 0);  // n2 = n1 -> n = n3
      }
  }

  TEST_CASE("phase rejects modes beyond the supported range") {
    CHECK_THROWS_AS(phase_phi(kPhaseModeLimit + 1, 0, 0), PhaseOverflow);
    CHECK_THROWS_AS(phase_factorized(0, -kPhaseModeLimit - 1, 0), PhaseOverflow);
    // Inside the accepted range, a value too large for the result type is reported too.
    CHECK_THROWS_AS(phase_phi(kPhaseModeLimit, -kPhaseModeLimit, kPhaseModeLimit), PhaseOverflow);
    CHECK_THROWS_AS(phase_factorized(kPhaseModeLimit, -kPhaseModeLimit, kPhaseModeLimit), PhaseOverflow);
    // Largest representable n^4 terms near the 64-bit edge: compare against 128-bit arithmetic here.
    const std::int64_t a = 18000, b = -18000, c = 18000;
    const __int128 n = a - b + c;
    const __int128 want = __int128(a) * a * a * a - __int128(b) * b * b * b + __int128(c) * c * c * c - n * n * n * n;
    CHECK(phase_phi(a, b, c) == static_cast<std::int64_t>(want));
  }

  TEST_CASE("Gamma(n) enumeration matches a brute-force count") {
    for (int box : {0, 1, 4, 7})
      for (int n = -box; n <= box; ++n) {
        std::size_t expect = 0;
        for (int n1 = -box; n1 <= box; ++n1)
          for (int n3 = -box; n3 <= box; ++n3) {
            const int n2 = n1 + n3 - n;
            if (std::abs(n2) <= box && n1 != n && n3 != n) ++expect;
          }
        const auto tuples = gamma_enumerate(n, box);
        CHECK(tuples.size() == expect);
        for (const auto& t : tuples) {
          CHECK(t.in_gamma());
          CHECK(t.n == t.n1 - t.n2 + t.n3);
          CHECK(t.phi == phase_phi(t.n1, t.n2, t.n3));
        }
      }
  }

  TEST_CASE("exhaustive phase check at a small box") {
    const PhaseCheckResult r = phase_check(10);
    CHECK(r.mismatches == 0);
    CHECK(r.tuples == 21ull * 21 * 21);
  }

  TEST_CASE("cubic product matches the triple-sum oracle") {
    std::mt19937_64 rng(11);
    for (int N : {0, 1, 2, 5, 9, 16}) {
      const SpectralField a = random_field(rng, N), b = random_field(rng, N), c = random_field(rng, N);
      const SpectralField oracle = triple_sum(a, b, c);
      const double scale = std::sqrt(oracle.mass()) + 1e-300;
      CHECK(l2_distance(cubic_product(a, b, c), oracle) / scale < 1e-12);
      CHECK(l2_distance(cubic_product_direct(a, b, c), oracle) / scale < 1e-12);
    }
  }

  TEST_CASE("cubic product of a single mode") {
    // |c e^{ikx}|^2 c e^{ikx} = |c|^2 c e^{ikx}.
    const SpectralField f = SpectralField::single_mode(6, 4, {0.5, -2.0});
    const SpectralField p = cubic_product(f, f, f);
    CHECK(std::abs(p.coeff(4) - std::norm(cplx{0.5, -2.0}) * cplx{0.5, -2.0}) < 1e-13);
    CHECK(p.mass() == doctest::Approx(std::pow(std::norm(cplx{0.5, -2.0}), 3)));
  }

  TEST_CASE("dealiased grid is large enough") {
    for (int N : {1, 5, 16, 64}) CHECK(dealiased_grid_size(N) >= static_cast<std::size_t>(4 * N + 1));
  }

  TEST_CASE("norms") {
    SpectralField f(4);
    f.set(0, 1.0);
    f.set(3, {0, 2});
    f.set(-2, -1.0);
    // Sobolev: sum <n>^{2s} |c_n|^2 with s = 1.
    CHECK(sobolev_norm(f, 1.0) == doctest::Approx(std::sqrt(1.0 + 10.0 * 4.0 + 5.0)));
    CHECK(sobolev_norm(f, 0.0) == doctest::Approx(std::sqrt(f.mass())));
    // Parseval under dx/(2 pi).
    CHECK(physical_lp_norm(f, 2.0, 64) == doctest::Approx(std::sqrt(f.mass())).epsilon(1e-13));
    // Single mode: |c| in every L^p.
    const SpectralField m = SpectralField::single_mode(5, -3, {3, 4});
    CHECK(physical_lp_norm(m, 4.0, 64) == doctest::Approx(5.0).epsilon(1e-13));
    // L^4 of 1 + e^{ix}: int |1 + e^{ix}|^4 = 1 + 4 + 1 = 6.
    SpectralField two(1);
    two.set(0, 1.0);
    two.set(1, 1.0);
    CHECK(physical_lp_norm(two, 4.0, 16) == doctest::Approx(std::pow(6.0, 0.25)).epsilon(1e-13));
    CHECK(norm(f, NormSpec{0.0, 2.0}, NormFlavor::fourier_lebesgue) == doctest::Approx(std::sqrt(f.mass())));
  }

  TEST_CASE("projectors partition the modes") {
    const SpectralField f = sample_data(7, 40, 0.0);
    SpectralField sum(40);
    for (int k = 0; k < dyadic_block_count(40); ++k) sum += project(f, ProjectorKind::dyadic, k).resized(40);
    CHECK(max_abs_diff(sum, f) == 0.0);
    const SpectralField lo = project(f, ProjectorKind::dirichlet, 9);
    const SpectralField hi = project(f, ProjectorKind::complement, 9);
    CHECK(max_abs_diff(lo.resized(40) + hi.resized(40), f) == 0.0);
    CHECK(dyadic_block(0) == 0);
    CHECK(dyadic_block(1) == 0);
    CHECK(dyadic_block(-2) == 1);
    CHECK(dyadic_block(7) == 2);
    CHECK(dyadic_block(8) == 3);
  }
}
