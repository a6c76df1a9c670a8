#include "wnls/space_time.hpp"

#include <cmath>
#include <stdexcept>

namespace wnls {

SpaceTimeField::SpaceTimeField(double t0, double dt, std::vector<SpectralField> slices)
    : cutoff_(slices.empty() ? 0 : slices.front().cutoff()), t0_(t0), dt_(dt), slices_(std::move(slices)) {
  if (slices_.empty()) throw std::invalid_argument("SpaceTimeField: no time samples");
  if (slices_.size() > 1 && !(dt > 0.0)) throw std::invalid_argument("SpaceTimeField: dt must be > 0");
  for (const auto& s : slices_)
    if (s.cutoff() != cutoff_) throw std::invalid_argument("SpaceTimeField: slices differ in cutoff");
}

SpaceTimeField SpaceTimeField::from_trajectory(const TrajectoryRecord& rec) {
  if (rec.times.empty()) throw std::invalid_argument("SpaceTimeField: empty trajectory");
  const std::size_t m = rec.times.size();
  const double dt = m > 1 ? (rec.times.back() - rec.times.front()) / static_cast<double>(m - 1) : 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double expect = rec.times.front() + static_cast<double>(j) * dt;
    if (std::abs(rec.times[j] - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
      throw std::invalid_argument("SpaceTimeField: trajectory samples are not uniform in time");
  }
  return SpaceTimeField(rec.times.front(), dt, rec.states);
}

SpaceTimeField SpaceTimeField::linear(const SpectralField& f, double t0, double dt, std::size_t count) {
  std::vector<SpectralField> slices;
  slices.reserve(count);
  for (std::size_t j = 0; j < count; ++j)
    slices.push_back(linear_propagate(f, t0 + static_cast<double>(j) * dt));
  return SpaceTimeField(t0, dt, std::move(slices));
}

std::size_t SpaceTimeField::index_of(double t) const {
  if (size() == 1) {
    if (std::abs(t - t0_) <= 1e-12) return 0;
    throw std::invalid_argument("SpaceTimeField: time not on grid");
  }
  const double x = (t - t0_) / dt_;
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-6 || r < 0 || r > static_cast<double>(size() - 1))
    throw std::invalid_argument("SpaceTimeField: time not on grid");
  return static_cast<std::size_t>(r);
}

std::vector<cplx> SpaceTimeField::profile(int n) const {
  std::vector<cplx> w(size());
  for (std::size_t j = 0; j < size(); ++j) w[j] = std::conj(linear_phase(n, time(j))) * value(n, j);
  return w;
}

SpaceTimeField SpaceTimeField::coarsened(int factor) const {
  if (factor < 1) throw std::invalid_argument("SpaceTimeField: coarsening factor must be >= 1");
  if ((size() - 1) % static_cast<std::size_t>(factor) != 0)
    throw std::invalid_argument("SpaceTimeField: grid does not coarsen evenly");
  std::vector<SpectralField> s;
  for (std::size_t j = 0; j < size(); j += static_cast<std::size_t>(factor)) s.push_back(slices_[j]);
  return SpaceTimeField(t0_, dt_ * factor, std::move(s));
}

}  // namespace wnls
