#include <doctest.h>

#include <cmath>
#include <set>

#include "wnls/random.hpp"
#include "wnls/stats.hpp"

using namespace wnls;

TEST_SUITE("random") {
  // Known-answer vectors published with Random123 (kat_vectors, philox4x32 10 rounds).
  TEST_CASE("Philox4x32-10 known answers") {
    using B = Philox4x32::Block;
    CHECK(Philox4x32(0)(B{0, 0, 0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32(0xffffffffffffffffULL)(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}) ==
          B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32(0x299f31d0a4093822ULL)(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}) ==
          B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  }

  TEST_CASE("trajectory seeds are distinct and stable") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_trajectory_seed(42, i));
    CHECK(seen.size() == 10000);
    CHECK(derive_trajectory_seed(42, 7) == derive_trajectory_seed(42, 7));
    CHECK(derive_trajectory_seed(42, 7) != derive_trajectory_seed(43, 7));
  }

  TEST_CASE("open unit interval") {
    CHECK(bits_to_open_unit(0) > 0.0);
    CHECK(bits_to_open_unit(~0ULL) < 1.0);
  }

  TEST_CASE("complex Gaussian moments") {
    const int M = 200000;
    cplx m1{}, m2{};
    double p2 = 0.0, p4 = 0.0;
    for (int i = 0; i < M; ++i) {
      const cplx g = gaussian_mode(99, i);
      m1 += g;
      m2 += g * g;
      p2 += std::norm(g);
      p4 += std::norm(g) * std::norm(g);
    }
    const double s = 1.0 / std::sqrt(static_cast<double>(M));
    CHECK(std::abs(m1) / M < 5 * s);
    CHECK(std::abs(m2) / M < 5 * s);
    CHECK(p2 / M == doctest::Approx(1.0).epsilon(5 * s));
    CHECK(p4 / M == doctest::Approx(2.0).epsilon(20 * s));  // E|g|^4 = 2
  }

  TEST_CASE("intensities are Exp(1) and phases uniform") {
    std::vector<double> inten, phase;
    for (int n = -3000; n <= 3000; ++n) {
      const cplx g = gaussian_mode(5, n);
      inten.push_back(std::norm(g));
      phase.push_back((std::arg(g) + M_PI) / (2 * M_PI));
    }
    CHECK(ks_exp1(inten).p_value > 1e-3);
    CHECK(ks_uniform(phase).p_value > 1e-3);
  }

  TEST_CASE("counter streams") {
    CounterStream a(1, 0), b(1, 0), c(1, 1);
    for (int i = 0; i < 10; ++i) {
      const double x = a.uniform();
      CHECK(x == b.uniform());
      CHECK(x != c.uniform());
      CHECK(x > 0.0);
      CHECK(x < 1.0);
    }
  }

  TEST_CASE("ensembles are mode-addressed") {
    const GaussianEnsemble small(17, 4), big(17, 30);
    for (int n = -4; n <= 4; ++n) CHECK(small.g(n) == big.g(n));
    CHECK(big.intensity(10, 4) == 0.0);
    CHECK(big.intensity(3, 4) == std::norm(big.g(3)));
    CHECK_THROWS(small.g(5));
    const SpectralField d = sample_data(GaussianEnsemble(17, 6, 1.0));
    CHECK(std::abs(d.coeff(3) - big.g(3) / std::sqrt(10.0)) < 1e-15);
  }

  TEST_CASE("mollifier symbols") {
    CHECK(mollifier_symbol(MollifierKind::sharp_cutoff, 1.0) == 1.0);
    CHECK(mollifier_symbol(MollifierKind::sharp_cutoff, 1.01) == 0.0);
    CHECK(mollifier_symbol(MollifierKind::smooth_bump, 0.5) == 1.0);
    CHECK(mollifier_symbol(MollifierKind::smooth_bump, 1.0) == 0.0);
    const double mid = mollifier_symbol(MollifierKind::smooth_bump, 0.75);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    CHECK(smooth_step(0.5) == doctest::Approx(0.5));  // symmetric smooth step
    const SpectralField f = sample_data(1, 20, 0.0);
    const SpectralField m = mollify(f, {MollifierKind::sharp_cutoff, 8});
    CHECK(m.coeff(8) == f.coeff(8));
    CHECK(m.coeff(9) == cplx{});
  }

  TEST_CASE("tail statistic") {
    const GaussianEnsemble e(8, 50);
    double expect = 0.0;
    for (int n = -50; n <= 50; ++n) expect = std::max(expect, std::abs(e.g(n)) / std::pow(1.0 + n * n, 0.05));
    CHECK(tail_statistic(e, 0.1) == doctest::Approx(expect));
  }
}
