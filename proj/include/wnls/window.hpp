#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace wnls {

/// Time cutoff: 1 on [-1, 1], exp(-1/x) smooth step down on [1, 2], 0 beyond.
double eta(double t);

/*!
 * Fourier transform of a power of eta, tabulated once.
 *
 * hat(xi) = int eta(t)^p e^{-it xi} dt (real and even). The table is built
 * by one FFT of eta^p sampled at dt = 2^-7 and zero padded to 2^20 points,
 * giving xi spacing ~7.7e-4 on [0, 402]; values in between are cubic
 * interpolated. Beyond the table the transform is below 1e-10 of its peak
 * and is returned as 0.
 */
class BumpTransform {
 public:
  explicit BumpTransform(int power);

  int power() const { return power_; }
  double operator()(double xi) const {
    const double a = std::abs(xi) * inv_dxi_;
    const auto k = static_cast<std::size_t>(a);
    if (k + 2 >= table_.size()) return 0.0;
    const double f = a - static_cast<double>(k);
    // Cubic Lagrange on k-1..k+2 (even symmetry at the origin).
    const double ym1 = k == 0 ? table_[1] : table_[k - 1];
    const double y0 = table_[k], y1 = table_[k + 1], y2 = table_[k + 2];
    return -ym1 * f * (f - 1) * (f - 2) / 6 + y0 * (f + 1) * (f - 1) * (f - 2) / 2 -
           y1 * (f + 1) * f * (f - 2) / 2 + y2 * (f + 1) * f * (f - 1) / 6;
  }
  double peak() const { return table_[0]; }
  // Smallest X with |hat(xi)| < rel * peak for all |xi| >= X.
  double decay_radius(double rel = 1e-10) const;
  // int eta^p dt.
  double integral() const { return table_[0]; }

 private:
  int power_;
  double dxi_;
  double inv_dxi_;
  std::vector<double> table_;
};

/// Shared instances for eta and eta^4 (built on first use, thread-safe).
const BumpTransform& eta_transform();
const BumpTransform& eta4_transform();

/// eta_delta(t) = eta(t / delta) and its transform delta * eta^(delta tau).
class EtaCutoff {
 public:
  explicit EtaCutoff(double delta);

  double delta() const { return delta_; }
  double operator()(double t) const { return eta(t / delta_); }
  double hat(double tau) const { return delta_ * (*hat_)(delta_ * tau); }
  // |tau| beyond which |hat| < 1e-10 of its peak.
  double tau_radius() const { return radius_ / delta_; }
  // supp eta_delta = [-2 delta, 2 delta].
  double support() const { return 2.0 * delta_; }

 private:
  double delta_;
  double radius_;
  const BumpTransform* hat_;
};

}  // namespace wnls
