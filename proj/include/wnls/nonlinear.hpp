#pragma once

#include "wnls/random.hpp"
#include "wnls/spectral.hpp"

namespace wnls {

/// N(u) = pi_N(|u|^2 u) - 2 M(u) u (dealiased FFT product).
SpectralField renormalized_nonlinearity(const SpectralField& u);

struct NonlinSplit {
  SpectralField non_resonant;  // N1: sum over Gamma(n)
  SpectralField resonant;      // N2: -|u_n|^2 u_n
};

/// N1 by explicit enumeration of Gamma(n), N2 mode-wise.
NonlinSplit nonlin_split(const SpectralField& u);

/*!
 * Random phases built from an ensemble truncated at `cutoff`:
 * |g_n^N|^2 and Psi_N = |g_1^N|^2 - |g_2^N|^2 + |g_3^N|^2 - |g_n^N|^2.
 * `sign` selects the modulation shift tau + n^4 + sign |g_n^N|^2 in the
 * random X^{s,b} norms.
 */
struct RandomPhaseSpec {
  const GaussianEnsemble* ensemble = nullptr;
  int cutoff = 0;
  int sign = 1;

  // |g_n^N|^2; throws when the ensemble does not cover a needed mode.
  double intensity(int n) const;
  double psi(int n1, int n2, int n3, int n) const {
    return intensity(n1) - intensity(n2) + intensity(n3) - intensity(n);
  }
  void require_covers(int cutoff_needed) const;
};

/// Gauged nonlinearities at time t:
/// N1w_n = sum_Gamma e^{it Psi} w1 conj(w2) w3, N2w_n = -(|w_n|^2 - |g_n^N|^2) w_n.
NonlinSplit gauged_nonlin(const SpectralField& w, double t, const RandomPhaseSpec& phases);

}  // namespace wnls
