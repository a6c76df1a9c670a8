#pragma once

#include <array>
#include <vector>

#include "wnls/random.hpp"

namespace wnls {

enum class TauQuadrature {
  gauss_legendre,   // clustered, graded composite Gauss-Legendre (fast path)
  uniform_simpson,  // one uniform grid per group, spacing min(1, delta)/8 (reference)
};

/*!
 * Parameters of the random functionals S_j^{s,b,delta} evaluated on white
 * noise truncated to the box |n| <= box.
 *
 * f_j = pi_{N_j}^perp of the noise (N_j = -1 keeps every mode). All of
 * n1, n2, n3 and n are restricted to the box, and the phase shifts use
 * |g_n^N|^2 with N = box.
 */
struct SFunctionalSpec {
  int j = 1;
  double s = -0.1;
  double b = 0.45;
  double delta = 0.2;
  int box = 8;
  std::array<int, 3> high_pass{-1, -1, -1};
};

/// S_j for one draw of the noise. The ensemble must cover the box.
double s_functional(const SFunctionalSpec& spec, const GaussianEnsemble& e,
                    TauQuadrature quad = TauQuadrature::gauss_legendre);

/// One summand of an S functional: coefficient and modulation shift c, so the term is a * eta^_delta(tau + c).
struct ShiftedTerm {
  cplx a;
  double c;
};

/// The groups whose squared L^2_tau norms add up to S_j^2 (weights folded into the coefficients).
std::vector<std::vector<ShiftedTerm>> s_functional_groups(const SFunctionalSpec& spec, const GaussianEnsemble& e);

/// int |sum_i a_i eta^_delta(tau + c_i)|^2 <tau>^{-2b} dtau.
double shifted_window_integral(const std::vector<ShiftedTerm>& terms, double delta, double b, TauQuadrature quad);

}  // namespace wnls
