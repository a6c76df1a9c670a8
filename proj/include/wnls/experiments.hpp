#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wnls/report.hpp"
#include "wnls/spectral.hpp"
#include "wnls/stats.hpp"

namespace wnls {

enum class StudyKind { invariance, convergence, residual, z1_scaling, cancellation, functional_tails };

std::string to_string(StudyKind k);
StudyKind study_kind_from_string(const std::string& s);

/*!
 * Parameters of one Monte Carlo study. Field meaning depends on the kind:
 *
 *   invariance        cutoffs = {N}, times = sample times, control = damped-flow samples
 *   convergence       cutoffs = {N_sim}, ladder m = 4, 8, ..., N_sim/4; s = Sobolev index
 *   residual          cutoffs = ladder of N, delta = horizon, spacing = time sampling
 *   z1_scaling        cutoffs = {N_max} (dyadic blocks N = 1, 2, ..., N_max), alpha, eps
 *   cancellation      cutoffs = {N}, times = {T}, spacing = time grid
 *   functional_tails  box, delta (against delta/2), s, b
 */
struct StudySpec {
  StudyKind kind = StudyKind::invariance;
  std::vector<int> cutoffs;
  std::vector<double> times;
  std::size_t samples = 2;
  std::uint64_t seed = 1;

  double delta = 0.05;
  double alpha = 0.0;
  double s = -0.6;
  double b = 0.45;
  int box = 16;
  double step_tolerance = 1e-6;
  double spacing = 0.005;
  std::size_t control_samples = 0;
  double damping = 0.5;

  // Thresholds.
  double fdr_q = 0.01;
  int max_rejections = 1;
  double corr_factor = 4.0;      // |correlation| < corr_factor / sqrt(M)
  double slope_tolerance = 0.1;  // |slope - (1/2 - alpha)| <= tolerance
  double eps = 0.1;              // exceedance threshold N^{1/2 - alpha + eps}
  double ratio_bound = 1.5;      // max/min of median sup ||v^N|| over the ladder
  double violation_bound = 1e-5;
  double duhamel_bound = 1e-5;
  double control_gap = 1e-2;
  double order_low = 3.0;  // accepted range of the observed quadrature order
  double order_high = 5.0;

  /// Kind-specific defaults (the protocol sizes used by the acceptance suite).
  static StudySpec defaults(StudyKind kind);
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  nlohmann::json to_json() const;
};

ExperimentReport run_study(const StudySpec& spec);

ExperimentReport run_invariance(const StudySpec& spec);
ExperimentReport run_convergence(const StudySpec& spec);
ExperimentReport run_residual(const StudySpec& spec);
ExperimentReport run_z1_scaling(const StudySpec& spec);
ExperimentReport run_cancellation(const StudySpec& spec);
ExperimentReport run_functional_tails(const StudySpec& spec);

/// ||P_N z||_{L^4([-delta, delta] x T)} for dyadic blocks k = 0..max_block of the resonant flow of f0
/// (f0 must cover 2^{max_block + 1} - 1). Exact in x, 16-point Gauss-Legendre in t.
std::vector<double> resonant_block_norms(const SpectralField& f0, double delta, int max_block);

/// Slope of log norm against log N over blocks N = 2^k; throws DegenerateSample with fewer than two
/// non-empty blocks.
SlopeFit fit_block_scaling(const std::vector<double>& norms);

/// Expected H^s mass of the white-noise tail |n| > N, sum_{|n| > N} <n>^{2s} (s < -1/2).
double white_noise_tail_mass(int cutoff, double s);

}  // namespace wnls
