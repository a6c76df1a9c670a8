#include "wnls/xsb.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "wnls/fft.hpp"

namespace wnls {

namespace {

struct WindowSlice {
  double centre;
  std::size_t first;
  std::size_t count;
};

WindowSlice locate_window(const SpaceTimeField& w, const EtaCutoff& window) {
  const double c = 0.5 * (w.t0() + w.t_end());
  const double r = window.support();
  const double slack = 1e-9 * std::max(1.0, std::abs(c));
  if (c - r < w.t0() - slack || c + r > w.t_end() + slack)
    throw std::invalid_argument("xsb: window [c - 2 delta, c + 2 delta] wider than the data interval");
  std::size_t first = w.size(), last = 0;
  for (std::size_t j = 0; j < w.size(); ++j)
    if (std::abs(w.time(j) - c) < r) {
      first = std::min(first, j);
      last = j;
    }
  if (first > last || last - first < 2) throw std::invalid_argument("xsb: too few samples inside the window");
  return {c, first, last - first + 1};
}

// Shared core: shift(n) is added to sigma = tau + n^4 in the weight.
template <class Shift>
double windowed_norm(const SpaceTimeField& w, double s, double b, const EtaCutoff& window, Shift shift) {
  const auto ws = locate_window(w, window);
  const int N = w.cutoff();
  const double h = w.dt();
  // Pad so the tau spacing is <= 1/8: <tau>^{2b} bends on the unit scale.
  const auto min_len = static_cast<std::size_t>(std::ceil(16.0 * M_PI / h));
  const std::size_t P = std::bit_ceil(std::max({std::size_t{64}, 8 * ws.count, min_len}));
  const double dsigma = 2.0 * M_PI / (static_cast<double>(P) * h);
  double total = 0.0;
#pragma omp parallel
  {
    FftBuffer buf(P);
#pragma omp for reduction(+ : total) schedule(dynamic)
    for (int n = -N; n <= N; ++n) {
      auto x = buf.data();
      std::fill(x.begin(), x.end(), cplx{});
      for (std::size_t j = 0; j < ws.count; ++j) {
        const std::size_t k = ws.first + j;
        const double t = w.time(k);
        x[j] = window(t - ws.centre) * std::conj(linear_phase(n, t)) * w.value(n, k);
      }
      buf.forward();
      const double sh = shift(n);
      double acc = 0.0;
      for (std::size_t k = 0; k < P; ++k) {
        const double sigma = (k < P / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(P)) * dsigma;
        acc += std::pow(1.0 + (sigma + sh) * (sigma + sh), b) * std::norm(h * x[k]);
      }
      total += std::pow(bracket(n), 2.0 * s) * acc * dsigma;
    }
  }
  return std::sqrt(total / (2.0 * M_PI));
}

double simpson_real(const std::vector<double>& f, double h) {
  const std::size_t j = f.size() - 1;
  if (j == 0) return 0.0;
  if (j == 1) return 0.5 * h * (f[0] + f[1]);
  const std::size_t even_end = j % 2 == 0 ? j : j - 3;
  double s = 0.0;
  for (std::size_t k = 0; k + 2 <= even_end; k += 2) s += h / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
  if (even_end != j) s += 3.0 * h / 8.0 * (f[j - 3] + 3.0 * f[j - 2] + 3.0 * f[j - 1] + f[j]);
  return s;
}

}  // namespace

double xsb_norm(const SpaceTimeField& w, double s, double b, const EtaCutoff& window) {
  return windowed_norm(w, s, b, window, [](int) { return 0.0; });
}

double random_xsb_norm(const SpaceTimeField& w, double s, double b, const EtaCutoff& window,
                       const RandomPhaseSpec& phases) {
  phases.require_covers(w.cutoff());
  const double sign = phases.sign >= 0 ? 1.0 : -1.0;
  return windowed_norm(w, s, b, window, [&](int n) { return sign * phases.intensity(n); });
}

double windowed_modulation_integral(double delta, double b) {
  if (!(delta > 0.0)) throw std::invalid_argument("windowed_modulation_integral: delta must be > 0");
  // xi = delta sigma: (1/2 pi) delta int <xi/delta>^{2b} eta^(xi)^2 dxi, even in xi.
  const auto& hat = eta_transform();
  const double R = hat.decay_radius(1e-10);
  const std::size_t m = 2 * static_cast<std::size_t>(std::ceil(R / 2e-3 / 2.0));
  const double dx = R / static_cast<double>(m);
  std::vector<double> f(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    const double xi = static_cast<double>(k) * dx;
    const double v = hat(xi);
    f[k] = std::pow(1.0 + xi * xi / (delta * delta), b) * v * v;
  }
  return 2.0 * delta * simpson_real(f, dx) / (2.0 * M_PI);
}

double windowed_l4_norm(const SpaceTimeField& w, const EtaCutoff& window) {
  const auto ws = locate_window(w, window);
  const std::size_t points = std::bit_ceil(static_cast<std::size_t>(4 * w.cutoff() + 2));
  std::vector<double> f(w.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t j = ws.first; j < ws.first + ws.count; ++j) {
    const double eta4 = std::pow(window(w.time(j) - ws.centre), 4);
    if (eta4 == 0.0) continue;
    const auto u = to_physical(w.slice(j), points);
    double acc = 0.0;
    for (const auto& v : u) acc += std::norm(v) * std::norm(v);
    f[j] = eta4 * acc / static_cast<double>(points);
  }
  return std::pow(simpson_real(f, w.dt()), 0.25);
}

double strichartz_ratio(const SpaceTimeField& w, const EtaCutoff& window) {
  const double den = xsb_norm(w, 0.0, kStrichartzB, window);
  if (!(den > 0.0)) throw std::invalid_argument("strichartz_ratio: zero X^{0,5/16} norm");
  return windowed_l4_norm(w, window) / den;
}

double strichartz_ratio_linear(const SpectralField& f, double delta) {
  const int N = f.cutoff();
  const double mass = f.mass();
  if (!(mass > 0.0)) throw std::invalid_argument("strichartz_ratio: zero X^{0,5/16} norm");
  const auto& hat4 = eta4_transform();
  double l4 = 0.0;
#pragma omp parallel
  {
    std::vector<cplx> a;
    std::vector<double> om;
#pragma omp for reduction(+ : l4) schedule(dynamic)
    for (int k = -2 * N; k <= 2 * N; ++k) {
      a.clear();
      om.clear();
      for (int p = std::max(-N, k - N); p <= std::min(N, k + N); ++p) {
        const int q = k - p;
        a.push_back(f.coeff(p) * f.coeff(q));
        const double p2 = static_cast<double>(p) * p, q2 = static_cast<double>(q) * q;
        om.push_back(p2 * p2 + q2 * q2);
      }
      double acc = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::norm(a[i]) * hat4(0.0);
        for (std::size_t j = i + 1; j < a.size(); ++j)
          acc += 2.0 * (a[i] * std::conj(a[j])).real() * hat4(delta * (om[i] - om[j]));
      }
      l4 += delta * acc;
    }
  }
  const double x2 = mass * windowed_modulation_integral(delta, kStrichartzB);
  return std::pow(l4, 0.25) / std::sqrt(x2);
}

double strichartz_ratio_single_mode(double delta) {
  return std::pow(delta * eta4_transform().integral(), 0.25) /
         std::sqrt(windowed_modulation_integral(delta, kStrichartzB));
}

}  // namespace wnls
