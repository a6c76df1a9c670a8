#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "wnls/spectral.hpp"

namespace wnls {

/*!
 * Philox4x32-10 counter-based generator (Salmon et al., SC'11).
 *
 * A keyed bijection on 128-bit counters: every output block depends only
 * on (key, counter), so draws can be addressed directly without stepping a
 * stream.
 */
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t key) : key_{lo(key), hi(key)} {}

  Block operator()(Block counter) const;

  static std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
  static std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

 private:
  std::array<std::uint32_t, 2> key_;
};

/// 64-bit finalizer of MurmurHash3; a bijection on 64-bit words.
std::uint64_t fmix64(std::uint64_t x);

/// Per-trajectory seed; bijective in `index` for a fixed master seed.
std::uint64_t derive_trajectory_seed(std::uint64_t master_seed, std::uint64_t index);

/// Uniform double in (0, 1) from 64 random bits (53-bit mantissa, never 0).
double bits_to_open_unit(std::uint64_t bits);

/// Standard complex Gaussian (E|g|^2 = 1) addressed by (seed, mode).
cplx gaussian_mode(std::uint64_t seed, std::int64_t mode);

/// Stream of i.i.d. draws addressed by (seed, stream, index); used for
/// Monte Carlo tasks that are not mode-addressed.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream) : gen_(seed), stream_(stream) {}

  double uniform();  // (0, 1)
  double normal();   // N(0, 1)
  cplx complex_gaussian();  // E|g|^2 = 1

 private:
  Philox4x32 gen_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/*!
 * Family {g_n}_{|n|<=N} of independent standard complex Gaussians.
 *
 * Draws produced from a seed are mode-addressed: g_n depends only on
 * (seed, n), so ensembles with different cutoffs share their low modes.
 */
class GaussianEnsemble {
 public:
  GaussianEnsemble(std::uint64_t seed, int cutoff, double alpha = 0.0);
  // Explicit draws g_{-N..N}, e.g. degenerate ensembles for tests.
  GaussianEnsemble(std::vector<cplx> draws, double alpha = 0.0, std::uint64_t seed = 0);

  int cutoff() const { return cutoff_; }
  double alpha() const { return alpha_; }
  std::uint64_t seed() const { return seed_; }

  bool covers(int n) const { return n >= -cutoff_ && n <= cutoff_; }
  cplx g(int n) const;
  // |g_n^M|^2 with g^M = 1_{|n|<=M} g (M < 0 means no truncation).
  double intensity(int n, int truncation = -1) const;

  // Raw draws as a field (no <n>^-alpha scaling).
  SpectralField draws() const;

 private:
  std::uint64_t seed_;
  int cutoff_;
  double alpha_;
  std::vector<cplx> g_;
};

/// Gaussian data sum g_n <n>^{-alpha} e^{inx}, |n| <= N.
SpectralField sample_data(std::uint64_t seed, int cutoff, double alpha);
SpectralField sample_data(const GaussianEnsemble& e);

enum class MollifierKind { smooth_bump, sharp_cutoff };

/// Fourier multiplier theta(n/m).
struct MollifierSpec {
  MollifierKind kind = MollifierKind::sharp_cutoff;
  int scale = 1;
};

/// Plateau ratio of the smooth bump: theta = 1 on [-1/2, 1/2].
inline constexpr double kBumpPlateau = 0.5;

/// exp(-1/x)-based smooth step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x);
/// Symbol theta(x): 1 for |x| <= 1/2, 0 for |x| >= 1 (smooth), or 1_{|x|<=1} (sharp).
double mollifier_symbol(MollifierKind kind, double x);

SpectralField mollify(const SpectralField& f, const MollifierSpec& spec);

/// max_{|n|<=N} |g_n| / <n>^eps.
double tail_statistic(const GaussianEnsemble& e, double eps);

}  // namespace wnls
