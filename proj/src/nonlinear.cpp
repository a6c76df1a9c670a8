#include "wnls/nonlinear.hpp"

#include <stdexcept>
#include <string>
#include <vector>

#include "wnls/fft.hpp"

namespace wnls {

SpectralField renormalized_nonlinearity(const SpectralField& u) {
  SpectralField out(u.cutoff());
  thread_cubic_workspace(u.cutoff()).cube(u, out);
  const double m2 = 2.0 * u.mass();
  for (int n = -u.cutoff(); n <= u.cutoff(); ++n) out.at(n) -= m2 * u.coeff(n);
  return out;
}

double RandomPhaseSpec::intensity(int n) const {
  if (!ensemble) throw std::invalid_argument("RandomPhaseSpec: no ensemble");
  if (std::abs(n) > cutoff) return 0.0;
  return ensemble->intensity(n);
}

void RandomPhaseSpec::require_covers(int cutoff_needed) const {
  if (!ensemble) throw std::invalid_argument("RandomPhaseSpec: no ensemble");
  const int need = std::min(cutoff, cutoff_needed);
  if (ensemble->cutoff() < need)
    throw std::invalid_argument("RandomPhaseSpec: ensemble cutoff " +
                                std::to_string(ensemble->cutoff()) + " does not cover modes up to " +
                                std::to_string(need));
}

namespace {

// sum over Gamma(n), |n_i| <= N, of rot1 w1 conj(rot2 w2) rot3 w3; rot = nullptr means 1.
SpectralField gamma_sum(const SpectralField& w, const std::vector<cplx>* rot) {
  const int N = w.cutoff();
  SpectralField out(N);
  std::vector<cplx> a(w.coeffs().begin(), w.coeffs().end());
  if (rot)
    for (std::size_t j = 0; j < a.size(); ++j) a[j] *= (*rot)[j];
#pragma omp parallel for schedule(dynamic)
  for (int n = -N; n <= N; ++n) {
    cplx acc{};
    for (int n1 = -N; n1 <= N; ++n1) {
      if (n1 == n) continue;
      const cplx x1 = a[static_cast<std::size_t>(n1 + N)];
      for (int n3 = -N; n3 <= N; ++n3) {
        if (n3 == n) continue;
        const int n2 = n1 + n3 - n;
        if (n2 < -N || n2 > N) continue;
        acc += x1 * std::conj(a[static_cast<std::size_t>(n2 + N)]) * a[static_cast<std::size_t>(n3 + N)];
      }
    }
    out.at(n) = acc;
  }
  return out;
}

}  // namespace

NonlinSplit nonlin_split(const SpectralField& u) {
  NonlinSplit s{gamma_sum(u, nullptr), SpectralField(u.cutoff())};
  for (int n = -u.cutoff(); n <= u.cutoff(); ++n) {
    const cplx c = u.coeff(n);
    s.resonant.at(n) = -std::norm(c) * c;
  }
  return s;
}

NonlinSplit gauged_nonlin(const SpectralField& w, double t, const RandomPhaseSpec& phases) {
  const int N = w.cutoff();
  phases.require_covers(N);
  // e^{it Psi} = e^{it|g1|^2} conj(e^{it|g2|^2}) e^{it|g3|^2} conj(e^{it|gn|^2}).
  std::vector<cplx> rot;
  rot.reserve(w.size());
  for (int n = -N; n <= N; ++n) rot.push_back(std::polar(1.0, t * phases.intensity(n)));
  NonlinSplit s{gamma_sum(w, &rot), SpectralField(N)};
  for (int n = -N; n <= N; ++n) {
    s.non_resonant.at(n) *= std::conj(rot[static_cast<std::size_t>(n + N)]);
    const cplx c = w.coeff(n);
    s.resonant.at(n) = -(std::norm(c) - phases.intensity(n)) * c;
  }
  return s;
}

}  // namespace wnls
