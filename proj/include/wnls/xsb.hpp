#pragma once

#include "wnls/nonlinear.hpp"
#include "wnls/space_time.hpp"
#include "wnls/window.hpp"

namespace wnls {

/*!
 * Windowed Fourier restriction norm
 *   ||eta_delta(. - c) w||_{X^{s,b}}^2 = (1/2 pi) sum_n <n>^{2s} int <tau + n^4>^{2b} |F_n(tau)|^2 dtau,
 * F_n the time transform of eta_delta(t - c) w^(n, t), c the midpoint of the
 * data interval. Exact in n; in tau the transform is a zero-padded DFT of the
 * demodulated profile e^{in^4 t} w^(n, t), so the grid only has to resolve
 * the profile, not the dispersion. Throws if [c - 2 delta, c + 2 delta] is
 * not inside the data interval.
 *
 * This is an upper-bound surrogate for the local-in-time norm (no infimum
 * over extensions is taken).
 */
double xsb_norm(const SpaceTimeField& w, double s, double b, const EtaCutoff& window);

/// Same with modulation weight <tau + n^4 + sign |g_n^N|^2>^b (sign from phases.sign).
double random_xsb_norm(const SpaceTimeField& w, double s, double b, const EtaCutoff& window,
                       const RandomPhaseSpec& phases);

/// (1/2 pi) int <sigma>^{2b} |eta_delta^(sigma)|^2 dsigma, the X^{0,b} norm squared of eta_delta e^{-in^4 t}.
double windowed_modulation_integral(double delta, double b);

/// ||eta_delta(. - c) w||_{L^4_{x,t}}: exact in x (oversampled grid), Simpson in t over the data grid.
/// The time grid must resolve the field's oscillations.
double windowed_l4_norm(const SpaceTimeField& w, const EtaCutoff& window);

/// ||eta w||_{L^4} / ||eta w||_{X^{0,5/16}} on the data grid. Throws on a zero denominator.
double strichartz_ratio(const SpaceTimeField& w, const EtaCutoff& window);

/*!
 * The same ratio for the linear flow S(t) f windowed at c = 0, in closed form:
 * ||eta u||_4^4 = sum_k sum_{p+q = p'+q' = k} b_p b_q conj(b_p' b_q') delta (eta^4)^(delta dw),
 * dw = p^4 + q^4 - p'^4 - q'^4, and ||eta u||_X^2 = sum |b_n|^2 times the modulation integral.
 * No time grid is involved.
 */
double strichartz_ratio_linear(const SpectralField& f, double delta);

/// Single mode: (delta int eta^4)^{1/4} / (windowed_modulation_integral(delta, 5/16))^{1/2}.
double strichartz_ratio_single_mode(double delta);

inline constexpr double kStrichartzB = 5.0 / 16.0;

}  // namespace wnls
