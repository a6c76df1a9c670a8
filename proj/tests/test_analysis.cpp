#include <doctest.h>

#include <cmath>
#include <functional>

#include "wnls/energy.hpp"
#include "wnls/flow.hpp"
#include "wnls/quadrature.hpp"
#include "wnls/random.hpp"
#include "wnls/s_functionals.hpp"
#include "wnls/space_time.hpp"
#include "wnls/window.hpp"
#include "wnls/xsb.hpp"

using namespace wnls;

namespace {

// Composite Simpson with m (even) panels, written here so the oracles do not share code with the library.
template <class F>
auto simpson(const F& f, double a, double b, int m) -> decltype(f(a)) {
  const double h = (b - a) / m;
  auto acc = f(a) + f(b);
  for (int k = 1; k < m; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return acc * (h / 3.0);
}

double eta_pow_integral(int p) {
  return simpson([p](double t) { return std::pow(eta(t), p); }, -2.0, 2.0, 40000);
}

double eta_prime_sq_integral() {
  const double h = 1e-5;
  return simpson([h](double t) {
    const double d = (eta(t + h) - eta(t - h)) / (2 * h);
    return d * d;
  }, -2.0, 2.0, 40000);
}

}  // namespace

TEST_SUITE("window") {
  TEST_CASE("eta shape") {
    CHECK(eta(0.0) == 1.0);
    CHECK(eta(1.0) == 1.0);
    CHECK(eta(-0.999) == 1.0);
    CHECK(eta(2.0) == 0.0);
    CHECK(eta(-2.5) == 0.0);
    CHECK(eta(1.5) == doctest::Approx(0.5));
    CHECK(eta(1.2) > eta(1.7));
  }

  TEST_CASE("tabulated transform matches direct quadrature") {
    for (int p : {1, 4}) {
      const BumpTransform& hat = p == 1 ? eta_transform() : eta4_transform();
      CHECK(hat.peak() == doctest::Approx(eta_pow_integral(p)).epsilon(1e-10));
      for (double xi : {0.0, 0.37, 1.0, 2.5, 7.3, 19.0, 40.0}) {
        const double direct =
            simpson([p, xi](double t) { return std::pow(eta(t), p) * std::cos(t * xi); }, -2.0, 2.0, 40000);
        CHECK(std::abs(hat(xi) - direct) < 1e-9 * hat.peak());
        CHECK(hat(-xi) == hat(xi));
      }
      CHECK(std::abs(hat(hat.decay_radius() * 1.01)) < 1e-10 * hat.peak());
    }
  }

  TEST_CASE("scaled cutoff") {
    const EtaCutoff w(0.25);
    CHECK(w(0.2) == 1.0);
    CHECK(w(0.6) == 0.0);
    CHECK(w.support() == 0.5);
    CHECK(w.hat(0.0) == doctest::Approx(0.25 * eta_transform().peak()));
    CHECK(w.hat(8.0) == doctest::Approx(0.25 * eta_transform()(2.0)));
  }

  TEST_CASE("modulation integral: Plancherel at b = 0 and b = 1") {
    const double i0 = eta_pow_integral(2), i1 = eta_prime_sq_integral();
    for (double delta : {0.05, 0.2, 1.0}) {
      // (1/2pi) int |eta_d^|^2 = int eta_d^2; the <sigma>^2 weight (b = 1) adds int (eta_d')^2.
      CHECK(windowed_modulation_integral(delta, 0.0) == doctest::Approx(delta * i0).epsilon(1e-8));
      CHECK(windowed_modulation_integral(delta, 1.0) == doctest::Approx(delta * i0 + i1 / delta).epsilon(1e-7));
    }
  }
}

TEST_SUITE("xsb") {
  TEST_CASE("linear solution: closed form of the windowed norm") {
    const double delta = 0.1;
    const SpectralField f = sample_data(4, 5, 0.0);
    const double dt = 4 * delta / 4000;
    const SpaceTimeField w = SpaceTimeField::linear(f, -2 * delta, dt, 4001);
    for (double s : {0.0, -0.3})
      for (double b : {0.0, 0.3, 0.45}) {
        const double want = std::sqrt(sobolev_norm(f, s) * sobolev_norm(f, s) * windowed_modulation_integral(delta, b));
        CHECK(xsb_norm(w, s, b, EtaCutoff(delta)) == doctest::Approx(want).epsilon(1e-6));
      }
  }

  TEST_CASE("random modulation with zero intensities reduces to the plain norm") {
    const double delta = 0.1;
    const SpectralField f = sample_data(4, 3, 0.0);
    const SpaceTimeField w = SpaceTimeField::linear(f, -2 * delta, 4 * delta / 2000, 2001);
    std::vector<cplx> zero(7, cplx{});
    const GaussianEnsemble e(std::move(zero));
    const RandomPhaseSpec phases{&e, 3, 1};
    CHECK(random_xsb_norm(w, 0.0, 0.4, EtaCutoff(delta), phases) ==
          doctest::Approx(xsb_norm(w, 0.0, 0.4, EtaCutoff(delta))).epsilon(1e-12));
  }

  TEST_CASE("window must fit in the data") {
    const SpaceTimeField w = SpaceTimeField::linear(sample_data(1, 2, 0.0), 0.0, 0.01, 11);
    CHECK_THROWS(xsb_norm(w, 0.0, 0.4, EtaCutoff(0.1)));
  }

  TEST_CASE("L4 norm of a single mode") {
    const double delta = 0.1;
    const SpectralField f = SpectralField::single_mode(4, 3, {0.6, 0.8});
    const SpaceTimeField w = SpaceTimeField::linear(f, -2 * delta, 4 * delta / 4000, 4001);
    CHECK(windowed_l4_norm(w, EtaCutoff(delta)) ==
          doctest::Approx(std::pow(delta * eta_pow_integral(4), 0.25)).epsilon(1e-9));
  }

  TEST_CASE("Strichartz ratio: grid, pair formula and single-mode closed form agree") {
    const double delta = 0.1;
    CHECK(strichartz_ratio_linear(SpectralField::single_mode(3, 2, {0, 1.5}), delta) ==
          doctest::Approx(strichartz_ratio_single_mode(delta)).epsilon(1e-9));
    const SpectralField f = sample_data(8, 3, 0.0);
    const SpaceTimeField w = SpaceTimeField::linear(f, -2 * delta, 4 * delta / 8000, 8001);
    CHECK(strichartz_ratio(w, EtaCutoff(delta)) == doctest::Approx(strichartz_ratio_linear(f, delta)).epsilon(1e-6));
  }
}

TEST_SUITE("quadrature") {
  TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n - 1 exactly") {
    for (int n : {1, 2, 5, 16}) {
      const GaussRule r = gauss_legendre(n);
      REQUIRE(r.x.size() == static_cast<std::size_t>(n));
      for (int k = 0; k <= 2 * n - 1; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += r.w[i] * std::pow(r.x[i], k);
        const double want = k % 2 ? 0.0 : 2.0 / (k + 1);
        CHECK(acc == doctest::Approx(want).epsilon(1e-13));
      }
    }
  }
}

TEST_SUITE("energy") {
  TEST_CASE("oscillatory moments against quadrature") {
    const double a = 0.7;
    for (double theta : {0.0, 1e-7, 0.3, -4.0, 55.0})
      for (int k = 0; k < 3; ++k) {
        const cplx want = simpson([&](double x) { return std::pow(x, k) * std::polar(1.0, theta * x); }, 0.0, a, 20000);
        CHECK(std::abs(oscillatory_moments(theta, a)[k] - want) < 1e-12);
      }
  }

  TEST_CASE("Simpson helper is exact on cubics for even and odd counts") {
    const double h = 0.13;
    std::vector<cplx> f;
    for (int k = 0; k < 12; ++k) {
      const double x = k * h;
      f.push_back({x * x * x - 2 * x + 1, 0.5 * x * x});
    }
    for (std::size_t j = 2; j < f.size(); ++j) {
      const double x = j * h;
      const cplx want{x * x * x * x / 4 - x * x + x, x * x * x / 6};
      CHECK(std::abs(simpson_to(f, j, h) - want) < 1e-13);
    }
    CHECK(simpson_to(f, 0, h) == cplx{});
  }

  TEST_CASE("energy identity, Duhamel split and residual on a short gauged run") {
    const int N = 6;
    const GaussianEnsemble e(13, N);
    FlowSpec fs;
    fs.variant = FlowVariant::gauged_truncated;
    fs.cutoff = N;
    fs.t_end = 0.01;
    fs.sample_interval = 5e-6;
    fs.step_tolerance = 1e-10;
    const SpaceTimeField w = SpaceTimeField::from_trajectory(evolve_truncated(sample_data(e), fs, &e));
    const RandomPhaseSpec phases{&e, N, 1};

    CHECK(energy_identity_violation(w, phases) < 1e-11);

    // E_n at one time agrees with the series.
    const auto series = energy_increment_series(w, 2, phases);
    CHECK(series[0] == 0.0);
    CHECK(energy_increment(w, 2, w.time(1000), phases) == doctest::Approx(series[1000]).epsilon(1e-12));
    const auto table = energy_increment_table(w, phases);
    CHECK(table[2 + N][777] == doctest::Approx(series[777]).epsilon(1e-12));

    const double T = w.t_end();
    CHECK(l2_distance(resonant_duhamel(w, phases, T), quintic_duhamel(w, phases, T)) < 1e-8);
    CHECK(gauged_residual(w, phases).relative() < 1e-6);
  }

  TEST_CASE("energy quadrature is fourth order") {
    // Coarse enough that the quadrature error sits well above rounding and integrator error.
    const int N = 6;
    const GaussianEnsemble e(13, N);
    FlowSpec fs;
    fs.variant = FlowVariant::gauged_truncated;
    fs.cutoff = N;
    fs.t_end = 0.01;
    fs.sample_interval = 1e-4;
    fs.step_tolerance = 1e-12;
    const SpaceTimeField w = SpaceTimeField::from_trajectory(evolve_truncated(sample_data(e), fs, &e));
    const RandomPhaseSpec phases{&e, N, 1};
    const double ratio = energy_identity_violation(w.coarsened(2), phases) / energy_identity_violation(w, phases);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
  }

  TEST_CASE("residual detects a wrong equation") {
    const int N = 4;
    const GaussianEnsemble e(2, N);
    FlowSpec fs;
    fs.variant = FlowVariant::renormalized;  // not the gauged equation
    fs.cutoff = N;
    fs.t_end = 0.01;
    fs.sample_interval = 1e-5;
    const SpaceTimeField u = SpaceTimeField::from_trajectory(evolve_truncated(sample_data(e), fs, &e));
    CHECK(gauged_residual(u, RandomPhaseSpec{&e, N, 1}).relative() > 1e-3);
  }
}

TEST_SUITE("s_functionals") {
  TEST_CASE("single shifted term: Plancherel at b = 0") {
    const double delta = 0.2, i0 = eta_pow_integral(2);
    for (double c : {0.0, 3.0, -250.5}) {
      const std::vector<ShiftedTerm> one{{cplx{0.6, -0.8}, c}};
      for (auto q : {TauQuadrature::gauss_legendre, TauQuadrature::uniform_simpson})
        CHECK(shifted_window_integral(one, delta, 0.0, q) == doctest::Approx(2 * M_PI * delta * i0).epsilon(1e-7));
    }
  }

  TEST_CASE("two well separated terms do not interfere") {
    const double delta = 0.2, b = 0.45;
    const std::vector<ShiftedTerm> a{{1.0, 0.0}}, c{{1.0, 5000.0}}, both{{1.0, 0.0}, {1.0, 5000.0}};
    const auto q = TauQuadrature::gauss_legendre;
    CHECK(shifted_window_integral(both, delta, b, q) ==
          doctest::Approx(shifted_window_integral(a, delta, b, q) + shifted_window_integral(c, delta, b, q)).epsilon(1e-8));
  }

  TEST_CASE("Gauss-Legendre path agrees with the Simpson reference") {
    const GaussianEnsemble e(77, 4);
    for (int j = 1; j <= 3; ++j) {
      SFunctionalSpec spec;
      spec.j = j;
      spec.box = 4;
      const double gl = s_functional(spec, e);
      CHECK(gl > 0.0);
      CHECK(gl == doctest::Approx(s_functional(spec, e, TauQuadrature::uniform_simpson)).epsilon(1e-6));
      double sum = 0.0;
      for (const auto& g : s_functional_groups(spec, e))
        sum += shifted_window_integral(g, spec.delta, spec.b, TauQuadrature::gauss_legendre);
      CHECK(std::sqrt(sum) == doctest::Approx(gl).epsilon(1e-12));
    }
  }

  TEST_CASE("high-pass projection removes everything above the box") {
    const GaussianEnsemble e(5, 4);
    SFunctionalSpec spec;
    spec.box = 4;
    spec.high_pass = {4, -1, -1};
    CHECK(s_functional(spec, e) == 0.0);
  }
}
