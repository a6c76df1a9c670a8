#include "wnls/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wnls {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

// Counter words 2..3 tag the purpose of a block.
constexpr std::uint32_t kTagMode = 0x6d6f6465u;    // "mode"
constexpr std::uint32_t kTagStream = 0x7374726du;  // "strm"

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::uint64_t join(std::uint32_t hi, std::uint32_t lo) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

// Box-Muller on two independent uniforms; returns (z0, z1) ~ N(0,1)^2.
std::pair<double, double> box_muller(double u1, double u2) {
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace

Philox4x32::Block Philox4x32::operator()(Block ctr) const {
  std::uint32_t k0 = key_[0];
  std::uint32_t k1 = key_[1];
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t fmix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

std::uint64_t derive_trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
  return fmix64(fmix64(master_seed) + index * 0x9E3779B97F4A7C15ULL);
}

double bits_to_open_unit(std::uint64_t bits) {
  // 52 bits so that the largest value 1 - 2^-53 is representable.
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

cplx gaussian_mode(std::uint64_t seed, std::int64_t mode) {
  const Philox4x32 gen(seed);
  const auto m = static_cast<std::uint64_t>(mode);
  const auto out = gen({Philox4x32::lo(m), Philox4x32::hi(m), kTagMode, 0u});
  const double u1 = bits_to_open_unit(join(out[0], out[1]));
  const double u2 = bits_to_open_unit(join(out[2], out[3]));
  const auto [z0, z1] = box_muller(u1, u2);
  return {z0 * std::numbers::sqrt2 / 2.0, z1 * std::numbers::sqrt2 / 2.0};
}

double CounterStream::uniform() {
  const auto out = gen_({Philox4x32::lo(counter_), Philox4x32::hi(counter_),
                         Philox4x32::lo(stream_) ^ kTagStream, Philox4x32::hi(stream_)});
  ++counter_;
  return bits_to_open_unit(join(out[0], out[1]));
}

double CounterStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const auto [z0, z1] = box_muller(u1, u2);
  spare_ = z1;
  has_spare_ = true;
  return z0;
}

cplx CounterStream::complex_gaussian() {
  const double a = normal();
  const double b = normal();
  return {a * std::numbers::sqrt2 / 2.0, b * std::numbers::sqrt2 / 2.0};
}

GaussianEnsemble::GaussianEnsemble(std::uint64_t seed, int cutoff, double alpha)
    : seed_(seed), cutoff_(cutoff), alpha_(alpha) {
  if (cutoff < 0) throw std::invalid_argument("GaussianEnsemble: negative cutoff");
  if (alpha < 0) throw std::invalid_argument("GaussianEnsemble: alpha must be >= 0");
  g_.reserve(2 * static_cast<std::size_t>(cutoff) + 1);
  for (int n = -cutoff; n <= cutoff; ++n) g_.push_back(gaussian_mode(seed, n));
}

GaussianEnsemble::GaussianEnsemble(std::vector<cplx> draws, double alpha, std::uint64_t seed)
    : seed_(seed), cutoff_(static_cast<int>(draws.size() / 2)), alpha_(alpha), g_(std::move(draws)) {
  if (g_.size() % 2 != 1) throw std::invalid_argument("GaussianEnsemble: need 2N+1 draws");
}

cplx GaussianEnsemble::g(int n) const {
  if (!covers(n))
    throw std::out_of_range("GaussianEnsemble: mode " + std::to_string(n) + " not covered (cutoff " +
                            std::to_string(cutoff_) + ")");
  return g_[static_cast<std::size_t>(n + cutoff_)];
}

double GaussianEnsemble::intensity(int n, int truncation) const {
  if (truncation >= 0 && std::abs(n) > truncation) return 0.0;
  return std::norm(g(n));
}

SpectralField GaussianEnsemble::draws() const { return SpectralField(cutoff_, g_); }

SpectralField sample_data(const GaussianEnsemble& e) {
  SpectralField f(e.cutoff());
  for (int n = -e.cutoff(); n <= e.cutoff(); ++n)
    f.at(n) = e.g(n) * std::pow(bracket(n), -e.alpha());
  return f;
}

SpectralField sample_data(std::uint64_t seed, int cutoff, double alpha) {
  return sample_data(GaussianEnsemble(seed, cutoff, alpha));
}

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double mollifier_symbol(MollifierKind kind, double x) {
  const double a = std::abs(x);
  if (kind == MollifierKind::sharp_cutoff) return a <= 1.0 ? 1.0 : 0.0;
  if (a <= kBumpPlateau) return 1.0;
  if (a >= 1.0) return 0.0;
  return 1.0 - smooth_step((a - kBumpPlateau) / (1.0 - kBumpPlateau));
}

SpectralField mollify(const SpectralField& f, const MollifierSpec& spec) {
  if (spec.scale < 1) throw std::invalid_argument("mollify: scale must be >= 1");
  SpectralField out = f;
  const double m = spec.scale;
  for (int n = -f.cutoff(); n <= f.cutoff(); ++n) out.at(n) *= mollifier_symbol(spec.kind, n / m);
  return out;
}

double tail_statistic(const GaussianEnsemble& e, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("tail_statistic: eps must be > 0");
  double m = 0.0;
  for (int n = -e.cutoff(); n <= e.cutoff(); ++n)
    m = std::max(m, std::abs(e.g(n)) * std::pow(bracket(n), -eps));
  return m;
}

}  // namespace wnls
