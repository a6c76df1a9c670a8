#include "wnls/window.hpp"

#include <cmath>
#include <stdexcept>

#include "wnls/fft.hpp"
#include "wnls/random.hpp"

namespace wnls {

double eta(double t) {
  const double a = std::abs(t);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  return 1.0 - smooth_step(a - 1.0);
}

namespace {

constexpr int kTableLog2 = 20;
constexpr double kTableDt = 1.0 / 128.0;

}  // namespace

BumpTransform::BumpTransform(int power) : power_(power) {
  if (power < 1) throw std::invalid_argument("BumpTransform: power must be >= 1");
  const std::size_t m = std::size_t{1} << kTableLog2;
  FftBuffer buf(m);
  auto x = buf.data();
  // Samples at t = j dt, wrapped so negative times sit at the end.
  const int half = static_cast<int>(2.0 / kTableDt);
  for (int j = -half; j <= half; ++j) {
    const double v = std::pow(eta(j * kTableDt), power);
    x[static_cast<std::size_t>((j + static_cast<long>(m)) % static_cast<long>(m))] = v;
  }
  buf.forward();
  dxi_ = 2.0 * M_PI / (static_cast<double>(m) * kTableDt);
  inv_dxi_ = 1.0 / dxi_;
  table_.resize(m / 2);
  for (std::size_t k = 0; k < m / 2; ++k) table_[k] = x[k].real() * kTableDt;
}

double BumpTransform::decay_radius(double rel) const {
  const double thr = rel * std::abs(peak());
  for (std::size_t k = table_.size(); k-- > 0;)
    if (std::abs(table_[k]) >= thr) return static_cast<double>(k + 1) * dxi_;
  return 0.0;
}

const BumpTransform& eta_transform() {
  static const BumpTransform t(1);
  return t;
}

const BumpTransform& eta4_transform() {
  static const BumpTransform t(4);
  return t;
}

EtaCutoff::EtaCutoff(double delta) : delta_(delta), hat_(&eta_transform()) {
  if (!(delta > 0.0)) throw std::invalid_argument("EtaCutoff: delta must be > 0");
  static const double radius = eta_transform().decay_radius(1e-10);
  radius_ = radius;
}

}  // namespace wnls
