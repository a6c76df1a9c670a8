#pragma once

#include <vector>

#include "wnls/flow.hpp"
#include "wnls/spectral.hpp"

namespace wnls {

/*!
 * Samples u^(n, t_j) on a uniform time grid t_j = t0 + j dt.
 *
 * Built from a trajectory (which must have been recorded at a fixed stride)
 * or from explicit slices.
 */
class SpaceTimeField {
 public:
  SpaceTimeField(double t0, double dt, std::vector<SpectralField> slices);

  static SpaceTimeField from_trajectory(const TrajectoryRecord& rec);
  // S(t) f sampled at t0 + j dt, j < count.
  static SpaceTimeField linear(const SpectralField& f, double t0, double dt, std::size_t count);

  int cutoff() const { return cutoff_; }
  std::size_t size() const { return slices_.size(); }
  double t0() const { return t0_; }
  double dt() const { return dt_; }
  double time(std::size_t j) const { return t0_ + static_cast<double>(j) * dt_; }
  double t_end() const { return time(size() - 1); }

  const SpectralField& slice(std::size_t j) const { return slices_[j]; }
  cplx value(int n, std::size_t j) const { return slices_[j].coeff(n); }
  // Index of grid time t; throws if t is not on the grid.
  std::size_t index_of(double t) const;

  // Interaction-picture profile W_n(t_j) = e^{i n^4 t_j} u^(n, t_j).
  std::vector<cplx> profile(int n) const;

  // Every other sample (for order-of-accuracy checks).
  SpaceTimeField coarsened(int factor) const;

 private:
  int cutoff_;
  double t0_;
  double dt_;
  std::vector<SpectralField> slices_;
};

}  // namespace wnls
