#include "wnls/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "wnls/fft.hpp"

namespace wnls {

SpectralField::SpectralField(int cutoff) : cutoff_(cutoff) {
  if (cutoff < 0) throw std::invalid_argument("SpectralField: negative cutoff");
  coeffs_.assign(2 * static_cast<std::size_t>(cutoff) + 1, cplx{});
}

SpectralField::SpectralField(int cutoff, std::vector<cplx> coeffs)
    : cutoff_(cutoff), coeffs_(std::move(coeffs)) {
  if (cutoff < 0) throw std::invalid_argument("SpectralField: negative cutoff");
  if (coeffs_.size() != 2 * static_cast<std::size_t>(cutoff) + 1)
    throw std::invalid_argument("SpectralField: expected 2N+1 coefficients, got " +
                                std::to_string(coeffs_.size()));
}

SpectralField SpectralField::single_mode(int cutoff, int n, cplx c) {
  SpectralField f(cutoff);
  f.at(n) = c;
  return f;
}

cplx& SpectralField::at(int n) {
  if (!contains(n))
    throw std::out_of_range("SpectralField: mode " + std::to_string(n) + " outside cutoff " +
                            std::to_string(cutoff_));
  return coeffs_[index(n)];
}

double SpectralField::mass() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m += std::norm(c);
  return m;
}

bool SpectralField::is_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const cplx& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

SpectralField SpectralField::resized(int new_cutoff) const {
  SpectralField out(new_cutoff);
  const int m = std::min(cutoff_, new_cutoff);
  for (int n = -m; n <= m; ++n) out.at(n) = coeff(n);
  return out;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  if (o.cutoff_ > cutoff_) *this = resized(o.cutoff_);
  for (int n = -o.cutoff_; n <= o.cutoff_; ++n) coeffs_[index(n)] += o.coeff(n);
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  if (o.cutoff_ > cutoff_) *this = resized(o.cutoff_);
  for (int n = -o.cutoff_; n <= o.cutoff_; ++n) coeffs_[index(n)] -= o.coeff(n);
  return *this;
}

SpectralField& SpectralField::operator*=(cplx s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx s, SpectralField a) { return a *= s; }

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  const int m = std::max(a.cutoff(), b.cutoff());
  double d = 0.0;
  for (int n = -m; n <= m; ++n) d = std::max(d, std::abs(a.coeff(n) - b.coeff(n)));
  return d;
}

double l2_distance(const SpectralField& a, const SpectralField& b) {
  const int m = std::max(a.cutoff(), b.cutoff());
  double d = 0.0;
  for (int n = -m; n <= m; ++n) d += std::norm(a.coeff(n) - b.coeff(n));
  return std::sqrt(d);
}

//---------------------------------------------------------------------------//
// Resonance phase
//---------------------------------------------------------------------------//

namespace {

using i128 = __int128;

void check_mode_range(std::int64_t n1, std::int64_t n2, std::int64_t n3) {
  for (auto v : {n1, n2, n3}) {
    if (v > kPhaseModeLimit || v < -kPhaseModeLimit)
      throw PhaseOverflow("phase: |n_i| = " + std::to_string(v) + " exceeds limit " +
                          std::to_string(kPhaseModeLimit));
  }
}

std::int64_t narrow(i128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw PhaseOverflow("phase: value does not fit in 64 bits");
  return static_cast<std::int64_t>(v);
}

i128 pow4(i128 v) {
  const i128 sq = v * v;
  return sq * sq;
}

}  // namespace

std::int64_t phase_phi(std::int64_t n1, std::int64_t n2, std::int64_t n3) {
  check_mode_range(n1, n2, n3);
  const i128 n = static_cast<i128>(n1) - n2 + n3;
  return narrow(pow4(n1) - pow4(n2) + pow4(n3) - pow4(n));
}

std::int64_t phase_factorized(std::int64_t n1, std::int64_t n2, std::int64_t n3) {
  check_mode_range(n1, n2, n3);
  const i128 a = n1, b = n2, c = n3;
  const i128 n = a - b + c;
  const i128 s = a + c;
  return narrow((a - b) * (a - n) * (a * a + b * b + c * c + n * n + 2 * s * s));
}

PhaseTuple PhaseTuple::make(std::int64_t n1, std::int64_t n2, std::int64_t n3) {
  return PhaseTuple{n1, n2, n3, n1 - n2 + n3, phase_phi(n1, n2, n3)};
}

void gamma_for_each(std::int64_t n, std::int64_t box,
                    const std::function<void(const PhaseTuple&)>& visit) {
  if (box < 0) throw std::invalid_argument("gamma_enumerate: negative box");
  for (std::int64_t n1 = -box; n1 <= box; ++n1) {
    if (n1 == n) continue;
    for (std::int64_t n3 = -box; n3 <= box; ++n3) {
      if (n3 == n) continue;
      const std::int64_t n2 = n1 + n3 - n;
      if (n2 < -box || n2 > box) continue;
      visit(PhaseTuple{n1, n2, n3, n, phase_phi(n1, n2, n3)});
    }
  }
}

std::vector<PhaseTuple> gamma_enumerate(std::int64_t n, std::int64_t box) {
  std::vector<PhaseTuple> out;
  gamma_for_each(n, box, [&](const PhaseTuple& t) { out.push_back(t); });
  return out;
}

PhaseCheckResult phase_check(std::int64_t box) {
  if (box < 0) throw std::invalid_argument("phase_check: negative box");
  std::uint64_t tuples = 0;
  std::uint64_t mismatches = 0;
#pragma omp parallel for reduction(+ : tuples, mismatches) schedule(static)
  for (std::int64_t n1 = -box; n1 <= box; ++n1) {
    for (std::int64_t n2 = -box; n2 <= box; ++n2) {
      for (std::int64_t n3 = -box; n3 <= box; ++n3) {
        ++tuples;
        if (phase_phi(n1, n2, n3) != phase_factorized(n1, n2, n3)) ++mismatches;
      }
    }
  }
  return {tuples, mismatches};
}

//---------------------------------------------------------------------------//
// Projectors and norms
//---------------------------------------------------------------------------//

int dyadic_block(int n) {
  const unsigned a = static_cast<unsigned>(n < 0 ? -n : n);
  if (a <= 1) return 0;
  return std::bit_width(a) - 1;
}

int dyadic_block_count(int cutoff) { return dyadic_block(cutoff) + 1; }

SpectralField project(const SpectralField& f, ProjectorKind kind, int level) {
  SpectralField out(f.cutoff());
  const int N = f.cutoff();
  for (int n = -N; n <= N; ++n) {
    const int a = n < 0 ? -n : n;
    bool keep = false;
    switch (kind) {
      case ProjectorKind::dirichlet:
        keep = a <= level;
        break;
      case ProjectorKind::complement:
        keep = a > level;
        break;
      case ProjectorKind::dyadic:
        keep = dyadic_block(n) == level;
        break;
    }
    if (keep) out.at(n) = f.coeff(n);
  }
  return out;
}

std::vector<cplx> to_physical(const SpectralField& f, std::size_t points) {
  FftBuffer buf(points);
  synthesize(f, buf);
  auto d = buf.data();
  return {d.begin(), d.end()};
}

double physical_lp_norm(const SpectralField& f, double p, std::size_t points) {
  if (!(p >= 1.0)) throw std::invalid_argument("norm: p must be >= 1");
  const auto x = to_physical(f, points);
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : x) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0.0;
  for (const auto& v : x) acc += std::pow(std::abs(v), p);
  return std::pow(acc / static_cast<double>(points), 1.0 / p);
}

double norm(const SpectralField& f, const NormSpec& spec, NormFlavor flavor) {
  if (!(spec.p >= 1.0)) throw std::invalid_argument("norm: p must be >= 1");
  const int N = f.cutoff();
  switch (flavor) {
    case NormFlavor::sobolev: {
      double acc = 0.0;
      for (int n = -N; n <= N; ++n) acc += std::pow(bracket(n), 2.0 * spec.s) * std::norm(f.coeff(n));
      return std::sqrt(acc);
    }
    case NormFlavor::fourier_lebesgue: {
      if (std::isinf(spec.p)) {
        double m = 0.0;
        for (int n = -N; n <= N; ++n) m = std::max(m, std::pow(bracket(n), spec.s) * std::abs(f.coeff(n)));
        return m;
      }
      double acc = 0.0;
      for (int n = -N; n <= N; ++n)
        acc += std::pow(std::pow(bracket(n), spec.s) * std::abs(f.coeff(n)), spec.p);
      return std::pow(acc, 1.0 / spec.p);
    }
    case NormFlavor::physical: {
      SpectralField g = f;
      if (spec.s != 0.0)
        for (int n = -N; n <= N; ++n) g.at(n) *= std::pow(bracket(n), spec.s);
      // 2(2N+1) points at least; power of two for the FFT.
      const std::size_t points = std::bit_ceil(static_cast<std::size_t>(2 * (2 * N + 1)));
      return physical_lp_norm(g, spec.p, points);
    }
  }
  return 0.0;
}

//---------------------------------------------------------------------------//
// Cubic products
//---------------------------------------------------------------------------//

// Products reach |k| <= 3N; a grid of L > 4N folds k = 3N to 3N - L < -N, outside the kept modes.
// Smallest 2^a 3^b 5^c at or above 4N + 1, which FFTW handles at full speed.
std::size_t dealiased_grid_size(int cutoff) {
  std::size_t L = static_cast<std::size_t>(4 * cutoff + 1);
  for (;; ++L) {
    std::size_t r = L;
    for (std::size_t p : {2u, 3u, 5u})
      while (r % p == 0) r /= p;
    if (r == 1) return L;
  }
}

namespace {

void require_same_cutoff(const SpectralField& a, const SpectralField& b, const SpectralField& c) {
  if (a.cutoff() != b.cutoff() || a.cutoff() != c.cutoff())
    throw std::invalid_argument("cubic_product: inputs must share a cutoff");
}

}  // namespace

SpectralField cubic_product(const SpectralField& f1, const SpectralField& f2,
                            const SpectralField& f3) {
  require_same_cutoff(f1, f2, f3);
  SpectralField out(f1.cutoff());
  thread_cubic_workspace(f1.cutoff()).product(f1, f2, f3, out);
  return out;
}

SpectralField cubic_product_direct(const SpectralField& f1, const SpectralField& f2,
                                   const SpectralField& f3) {
  require_same_cutoff(f1, f2, f3);
  const int N = f1.cutoff();
  SpectralField out(N);
  for (int n = -N; n <= N; ++n) {
    cplx acc{};
    for (int n1 = -N; n1 <= N; ++n1) {
      for (int n3 = -N; n3 <= N; ++n3) {
        const int n2 = n1 + n3 - n;
        if (n2 < -N || n2 > N) continue;
        acc += f1.coeff(n1) * std::conj(f2.coeff(n2)) * f3.coeff(n3);
      }
    }
    out.at(n) = acc;
  }
  return out;
}

}  // namespace wnls
