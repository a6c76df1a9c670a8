#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wnls/random.hpp"
#include "wnls/spectral.hpp"

namespace wnls {

enum class FlowVariant {
  original,          // i u_t = u_xxxx + pi_N(|u|^2 u)
  renormalized,      // i u_t = u_xxxx + pi_N(|u|^2 u) - 2 M(u) u
  gauged_truncated,  // the renormalized flow seen through the random gauge J_N
  resonant,          // i u_t = u_xxxx - |u_n|^2 u_n, mode by mode
  damped_control,    // renormalized plus -i gamma pi_N(|u|^2 u); breaks invariance on purpose
};

std::string to_string(FlowVariant v);
FlowVariant flow_variant_from_string(const std::string& s);

struct FlowSpec {
  FlowVariant variant = FlowVariant::renormalized;
  int cutoff = 0;
  double t_end = 0.0;
  // 0 picks min(1e-2, 0.5/(1 + mass)) and halves it until the step check passes.
  double dt = 0.0;
  // Steps between recorded samples. Ignored when sample_interval > 0.
  int sample_stride = 1;
  // Record every sample_interval time units; dt is shrunk to divide it.
  double sample_interval = 0.0;
  // Relative l2 gap allowed between one step of dt and two of dt/2.
  double step_tolerance = 1e-10;
  int check_every = 64;
  double damping = 0.5;  // damped_control only
};

/// An explicit dt failed the step-halving check, or an automatic dt could not be found.
class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The solution blew up (NaN or Inf in a state).
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrajectoryRecord {
  FlowSpec spec;
  double dt = 0.0;  // step actually used
  long steps = 0;
  std::vector<double> times;
  std::vector<SpectralField> states;
  std::optional<GaussianEnsemble> ensemble;

  std::size_t size() const { return times.size(); }
  const SpectralField& final_state() const { return states.back(); }
};

/// e^{-i n^4 t}, with the argument reduced mod 2 pi in extended precision.
cplx linear_phase(std::int64_t n, long double t);

/// c_n -> e^{-i n^4 t} c_n.
SpectralField linear_propagate(const SpectralField& f, double t);

/// z_n(t) = e^{-i n^4 t} e^{i t |z_n(0)|^2} z_n(0) for arbitrary data.
SpectralField resonant_flow_exact(const SpectralField& f0, double t);

/// e^{-i n^4 t} sum_{k<=K} (it)^k/k! |c_n|^{2k} c_n.
SpectralField resonant_series(const SpectralField& f0, double t, int order);

/// Pseudo-spectral Galerkin flow at the spec cutoff (Lawson RK4).
/// gauged_truncated needs an ensemble covering the cutoff; its initial state is w(0) = u(0).
TrajectoryRecord evolve_truncated(const SpectralField& f0, const FlowSpec& spec,
                                  const GaussianEnsemble* ensemble = nullptr);

/// First step size the automatic search would try a run with (the initial halving check only).
double initial_step(const SpectralField& f0, const FlowSpec& spec, const GaussianEnsemble* ensemble = nullptr);

/// Flow at cutoff N_big = f0.cutoff() where only modes |n| <= inner feel the
/// nonlinearity pi_inner(N(pi_inner u)); the rest evolve linearly.
TrajectoryRecord evolve_extended(const SpectralField& f0, int inner, const FlowSpec& spec);

enum class GaugeDirection { forward, inverse };

/// Multiplies the state at time t by e^{+-2it M(u(t))}.
TrajectoryRecord gauge_deterministic(const TrajectoryRecord& u, GaugeDirection dir);

/// Multiplies mode n at time t by e^{-+it|g_n^N|^2}; phase_cutoff < 0 means no truncation.
TrajectoryRecord gauge_random(const TrajectoryRecord& u, const GaussianEnsemble& e, int phase_cutoff,
                              GaugeDirection dir);
SpectralField gauge_random(const SpectralField& u, double t, const GaussianEnsemble& e,
                           int phase_cutoff, GaugeDirection dir);

}  // namespace wnls
