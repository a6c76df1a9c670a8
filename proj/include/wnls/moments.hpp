#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "wnls/spectral.hpp"

namespace wnls {

/// One coefficient c_{n1 n2 n3} of a multilinear Gaussian sum at output mode n = n1 - n2 + n3.
struct MomentTerm {
  int n1 = 0;
  int n2 = 0;
  int n3 = 0;
  cplx c{};
};

/*!
 * Sigma_n = (1/prod k_j!) sum_Gamma c_{n1 n2 n3} prod_{j in A} |g_{n_j}|^{2 k_j} g*_{n_j},
 * g* = g for j = 1, 3 and conj(g) for j = 2. Positions outside A carry no
 * Gaussian factor.
 */
struct MomentSpec {
  std::array<bool, 3> in_set{true, true, true};
  std::array<int, 3> k{0, 0, 0};
  std::vector<MomentTerm> terms;

  int degree() const { return k[0] + k[1] + k[2]; }
  // Throws unless all terms share one n and lie in Gamma(n), and 0 <= k_j <= 3.
  void validate() const;
};

/// Sigma_n for one set of Gaussians, g(n) looked up by the callback.
cplx moment_sum(const MomentSpec& spec, const std::function<cplx(int)>& g);

/// E|Sigma_n|^2 by exact pairing: E[g^a conj(g)^b] = delta_ab a!, mode by mode.
double second_moment_exact(const MomentSpec& spec);

struct MomentEstimate {
  double mean = 0.0;       // Monte Carlo E|Sigma_n|^2
  double std_error = 0.0;
  double exact = 0.0;      // pairing oracle
  double bound = 0.0;      // 2 C^{2k} sum |c|^2 with C = kMomentConstant
  std::size_t samples = 0;
};

inline constexpr double kMomentConstant = 3.0;

/// Monte Carlo over `samples` independent draws (seeds derived from master_seed), with the exact value and bound.
MomentEstimate multilinear_second_moment(const MomentSpec& spec, std::size_t samples, std::uint64_t master_seed);

}  // namespace wnls
