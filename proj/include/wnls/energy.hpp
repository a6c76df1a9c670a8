#pragma once

#include <array>
#include <vector>

#include "wnls/nonlinear.hpp"
#include "wnls/space_time.hpp"

namespace wnls {

/*!
 * E_n(t_j) = -2 Re i int_{t0}^{t_j} sum_Gamma e^{it Psi} w1 conj(w2) w3 conj(w_n) dt
 * at every grid time.
 *
 * Each tuple is integrated in the interaction picture: with W = e^{in^4 t} w
 * the integrand is e^{i(Psi - Phi)t} W1 conj(W2) W3 conj(Wn), and only the
 * slowly varying product of profiles is interpolated (quadratic per Simpson
 * panel); the oscillating exponential is integrated exactly. Odd grid points
 * use the first half of the panel.
 */
std::vector<double> energy_increment_series(const SpaceTimeField& w, int n, const RandomPhaseSpec& phases);

/// E_n at one grid time t.
double energy_increment(const SpaceTimeField& w, int n, double t, const RandomPhaseSpec& phases);

/// All modes at once: result[n + N][j].
std::vector<std::vector<double>> energy_increment_table(const SpaceTimeField& w, const RandomPhaseSpec& phases);

/// I~_2(t) = i int_0^t S(t - t') sum_n e^{inx} E_n(t') w(n, t') dt' (Simpson on the grid).
SpectralField quintic_duhamel(const SpaceTimeField& w, const RandomPhaseSpec& phases, double t);

/// I_2(t) = -i int_0^t S(t - t') N2w(w)(t') dt', the resonant Duhamel term evaluated directly.
SpectralField resonant_duhamel(const SpaceTimeField& w, const RandomPhaseSpec& phases, double t);

/// max over modes and grid times of | |w_n(t_j)|^2 - |g_n^N|^2 - E_n(t_j) |.
double energy_identity_violation(const SpaceTimeField& w, const RandomPhaseSpec& phases);

struct ResidualReport {
  double max_abs = 0.0;  // max |d/dt W - e^{in^4 t}(-i)(N1w + N2w)| over interior points
  double max_rhs = 0.0;  // max |N1w + N2w|, for scale
  double relative() const { return max_rhs > 0.0 ? max_abs / max_rhs : max_abs; }
};

/// Checks that w solves i w_t = w_xxxx + N1w + N2w with fourth-order central differences.
ResidualReport gauged_residual(const SpaceTimeField& w, const RandomPhaseSpec& phases);

// Quadrature helpers, exposed for tests.

/// int_0^a x^k e^{i theta x} dx for k = 0, 1, 2.
std::array<cplx, 3> oscillatory_moments(double theta, double a);

/// Composite Simpson of f on a uniform grid from index 0 to j (3/8 rule closes odd counts).
cplx simpson_to(const std::vector<cplx>& f, std::size_t j, double h);

}  // namespace wnls
