#include "wnls/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace wnls {

namespace {

constexpr cplx I{0.0, 1.0};

using Profiles = std::vector<std::vector<cplx>>;

Profiles all_profiles(const SpaceTimeField& w) {
  const int N = w.cutoff();
  Profiles p(static_cast<std::size_t>(2 * N + 1));
  for (int m = -N; m <= N; ++m) p[static_cast<std::size_t>(m + N)] = w.profile(m);
  return p;
}

// Weights of the three panel nodes for int_0^{a h} P(s) e^{i lambda s} ds,
// P the quadratic through the nodes s = 0, h, 2h.
std::array<cplx, 3> filon_weights(double lambda, double h, double a) {
  const auto mom = oscillatory_moments(lambda * h, a);
  return {h * (mom[2] - 3.0 * mom[1] + 2.0 * mom[0]) / 2.0, h * (-mom[2] + 2.0 * mom[1]),
          h * (mom[2] - mom[1]) / 2.0};
}

void check_grid(const SpaceTimeField& w) {
  if (w.size() < 3) throw std::invalid_argument("energy functionals need at least 3 time samples");
}

// sum over tuples of int_{t0}^{t_j} e^{i lambda t} H(t) dt, for every j.
std::vector<cplx> cumulative_gamma_integral(const SpaceTimeField& w, const Profiles& prof, int n,
                                            const RandomPhaseSpec& phases) {
  const int N = w.cutoff();
  const std::size_t T = w.size();
  const double h = w.dt();
  std::vector<cplx> acc(T, cplx{});
  std::vector<cplx> H(T);
  const auto& Wn = prof[static_cast<std::size_t>(n + N)];
  gamma_for_each(n, N, [&](const PhaseTuple& q) {
    const auto& W1 = prof[static_cast<std::size_t>(q.n1 + N)];
    const auto& W2 = prof[static_cast<std::size_t>(q.n2 + N)];
    const auto& W3 = prof[static_cast<std::size_t>(q.n3 + N)];
    for (std::size_t j = 0; j < T; ++j) H[j] = W1[j] * std::conj(W2[j]) * W3[j] * std::conj(Wn[j]);
    const double lambda =
        phases.psi(static_cast<int>(q.n1), static_cast<int>(q.n2), static_cast<int>(q.n3), n) -
        static_cast<double>(q.phi);
    const auto full = filon_weights(lambda, h, 2.0);
    const auto half = filon_weights(lambda, h, 1.0);
    const cplx step = std::polar(1.0, 2.0 * lambda * h);
    cplx phase = std::polar(1.0, lambda * w.t0());
    cplx F{};
    std::size_t k = 0;
    for (; k + 2 < T; k += 2) {
      const cplx p0 = phase * H[k], p1 = phase * H[k + 1], p2 = phase * H[k + 2];
      acc[k + 1] += F + half[0] * p0 + half[1] * p1 + half[2] * p2;
      F += full[0] * p0 + full[1] * p1 + full[2] * p2;
      acc[k + 2] += F;
      phase *= step;
    }
    if (k + 1 < T) {
      // Even sample count: last interval from the panel ending at T-1.
      const std::size_t s = T - 3;
      const cplx ps = std::polar(1.0, lambda * w.time(s));
      const cplx p0 = ps * H[s], p1 = ps * H[s + 1], p2 = ps * H[s + 2];
      acc[T - 1] += F + (full[0] - half[0]) * p0 + (full[1] - half[1]) * p1 + (full[2] - half[2]) * p2;
    }
  });
  return acc;
}

std::vector<double> increment_from(const std::vector<cplx>& acc) {
  std::vector<double> e(acc.size());
  // -2 Re(i z) = 2 Im z
  for (std::size_t j = 0; j < acc.size(); ++j) e[j] = 2.0 * acc[j].imag();
  return e;
}

}  // namespace

std::array<cplx, 3> oscillatory_moments(double theta, double a) {
  std::array<cplx, 3> m{};
  if (std::abs(theta * a) < 1.0) {
    // sum_j (i theta)^j a^{k+j+1} / (j! (k+j+1))
    for (int k = 0; k < 3; ++k) {
      cplx term = std::pow(a, k + 1);
      cplx sum{};
      for (int j = 0; j < 40; ++j) {
        const cplx add = term / static_cast<double>(k + j + 1);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
        term *= I * theta * a / static_cast<double>(j + 1);
      }
      m[static_cast<std::size_t>(k)] = sum;
    }
    return m;
  }
  const cplx e = std::polar(1.0, theta * a);
  const cplx inv = 1.0 / (I * theta);
  m[0] = (e - 1.0) * inv;
  m[1] = (a * e - m[0]) * inv;
  m[2] = (a * a * e - 2.0 * m[1]) * inv;
  return m;
}

cplx simpson_to(const std::vector<cplx>& f, std::size_t j, double h) {
  if (j >= f.size()) throw std::out_of_range("simpson_to: index beyond samples");
  if (j == 0) return {};
  if (j == 1) return 0.5 * h * (f[0] + f[1]);
  std::size_t even_end = j % 2 == 0 ? j : j - 3;
  cplx s{};
  for (std::size_t k = 0; k + 2 <= even_end; k += 2) s += h / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
  if (even_end != j) s += 3.0 * h / 8.0 * (f[j - 3] + 3.0 * f[j - 2] + 3.0 * f[j - 1] + f[j]);
  return s;
}

std::vector<double> energy_increment_series(const SpaceTimeField& w, int n, const RandomPhaseSpec& phases) {
  check_grid(w);
  if (std::abs(n) > w.cutoff()) throw std::out_of_range("energy_increment: mode outside cutoff");
  phases.require_covers(w.cutoff());
  const auto prof = all_profiles(w);
  return increment_from(cumulative_gamma_integral(w, prof, n, phases));
}

double energy_increment(const SpaceTimeField& w, int n, double t, const RandomPhaseSpec& phases) {
  const std::size_t j = w.index_of(t);
  return energy_increment_series(w, n, phases)[j];
}

std::vector<std::vector<double>> energy_increment_table(const SpaceTimeField& w, const RandomPhaseSpec& phases) {
  check_grid(w);
  phases.require_covers(w.cutoff());
  const int N = w.cutoff();
  const auto prof = all_profiles(w);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(2 * N + 1));
#pragma omp parallel for schedule(dynamic)
  for (int n = -N; n <= N; ++n)
    out[static_cast<std::size_t>(n + N)] = increment_from(cumulative_gamma_integral(w, prof, n, phases));
  return out;
}

SpectralField quintic_duhamel(const SpaceTimeField& w, const RandomPhaseSpec& phases, double t) {
  const std::size_t j = w.index_of(t);
  const int N = w.cutoff();
  SpectralField out(N);
  if (j == 0) return out;
  const auto table = energy_increment_table(w, phases);
  std::vector<cplx> f(w.size());
  for (int n = -N; n <= N; ++n) {
    const auto Wn = w.profile(n);
    const auto& En = table[static_cast<std::size_t>(n + N)];
    for (std::size_t k = 0; k <= j; ++k) f[k] = En[k] * Wn[k];
    out.at(n) = I * linear_phase(n, w.time(j)) * simpson_to(f, j, w.dt());
  }
  return out;
}

SpectralField resonant_duhamel(const SpaceTimeField& w, const RandomPhaseSpec& phases, double t) {
  const std::size_t j = w.index_of(t);
  const int N = w.cutoff();
  phases.require_covers(N);
  SpectralField out(N);
  if (j == 0) return out;
  std::vector<cplx> f(w.size());
  for (int n = -N; n <= N; ++n) {
    const auto Wn = w.profile(n);
    const double g2 = phases.intensity(n);
    for (std::size_t k = 0; k <= j; ++k) f[k] = (std::norm(Wn[k]) - g2) * Wn[k];
    // -i * (-(|w|^2 - g^2) w) = +i (...)
    out.at(n) = I * linear_phase(n, w.time(j)) * simpson_to(f, j, w.dt());
  }
  return out;
}

double energy_identity_violation(const SpaceTimeField& w, const RandomPhaseSpec& phases) {
  const auto table = energy_increment_table(w, phases);
  const int N = w.cutoff();
  double worst = 0.0;
  for (int n = -N; n <= N; ++n) {
    const double g2 = phases.intensity(n);
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double lhs = std::norm(w.value(n, j)) - g2;
      worst = std::max(worst, std::abs(lhs - table[static_cast<std::size_t>(n + N)][j]));
    }
  }
  return worst;
}

ResidualReport gauged_residual(const SpaceTimeField& w, const RandomPhaseSpec& phases) {
  if (w.size() < 5) throw std::invalid_argument("gauged_residual: need at least 5 time samples");
  const int N = w.cutoff();
  phases.require_covers(N);
  const auto prof = all_profiles(w);
  const double h = w.dt();
  ResidualReport r;
  for (std::size_t j = 2; j + 2 < w.size(); ++j) {
    const auto nl = gauged_nonlin(w.slice(j), w.time(j), phases);
    for (int n = -N; n <= N; ++n) {
      const auto& W = prof[static_cast<std::size_t>(n + N)];
      const cplx dW = (W[j - 2] - 8.0 * W[j - 1] + 8.0 * W[j + 1] - W[j + 2]) / (12.0 * h);
      const cplx rhs = nl.non_resonant.coeff(n) + nl.resonant.coeff(n);
      const cplx expect = -I * std::conj(linear_phase(n, w.time(j))) * rhs;
      r.max_abs = std::max(r.max_abs, std::abs(dW - expect));
      r.max_rhs = std::max(r.max_rhs, std::abs(rhs));
    }
  }
  return r;
}

}  // namespace wnls
