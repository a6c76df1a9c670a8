#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace wnls {

using cplx = std::complex<double>;

/// Japanese bracket <x> = (1 + x^2)^{1/2}.
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

/*!
 * Trigonometric polynomial on the circle, sum_{|n|<=N} c_n e^{inx}.
 *
 * Coefficients are taken against the normalized measure dx/(2 pi), so
 * {e^{inx}} is orthonormal and mass() is the squared L^2 norm with no 2 pi
 * factors. Storage index of mode n is n + N.
 */
class SpectralField {
 public:
  SpectralField() : SpectralField(0) {}
  explicit SpectralField(int cutoff);
  SpectralField(int cutoff, std::vector<cplx> coeffs);

  static SpectralField single_mode(int cutoff, int n, cplx c);

  int cutoff() const { return cutoff_; }
  std::size_t size() const { return coeffs_.size(); }

  bool contains(int n) const { return n >= -cutoff_ && n <= cutoff_; }
  // Zero outside [-N, N].
  cplx coeff(int n) const { return contains(n) ? coeffs_[index(n)] : cplx{}; }
  cplx& at(int n);
  void set(int n, cplx c) { at(n) = c; }

  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs() { return coeffs_; }

  double mass() const;
  bool is_finite() const;

  // Zero-pads or truncates to the new cutoff.
  SpectralField resized(int new_cutoff) const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(cplx s);

  friend bool operator==(const SpectralField&, const SpectralField&) = default;

 private:
  std::size_t index(int n) const { return static_cast<std::size_t>(n + cutoff_); }

  int cutoff_;
  std::vector<cplx> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx s, SpectralField a);

// Max |a_n - b_n| over the union of modes.
double max_abs_diff(const SpectralField& a, const SpectralField& b);
// sqrt(mass(a - b)) over the union of modes.
double l2_distance(const SpectralField& a, const SpectralField& b);

//---------------------------------------------------------------------------//
// Resonance phase
//---------------------------------------------------------------------------//

/// Largest |n_i| accepted by the integer phase functions.
inline constexpr std::int64_t kPhaseModeLimit = 100000;

class PhaseOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Integer quadruple on the convolution hyperplane n = n1 - n2 + n3.
struct PhaseTuple {
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  std::int64_t n3 = 0;
  std::int64_t n = 0;
  std::int64_t phi = 0;

  static PhaseTuple make(std::int64_t n1, std::int64_t n2, std::int64_t n3);
  // n1 != n and n3 != n.
  bool in_gamma() const { return n1 != n && n3 != n; }

  friend bool operator==(const PhaseTuple&, const PhaseTuple&) = default;
};

/// n1^4 - n2^4 + n3^4 - n^4 with n = n1 - n2 + n3, exact.
std::int64_t phase_phi(std::int64_t n1, std::int64_t n2, std::int64_t n3);
/// (n1 - n2)(n1 - n)(n1^2 + n2^2 + n3^2 + n^2 + 2(n1 + n3)^2), exact.
std::int64_t phase_factorized(std::int64_t n1, std::int64_t n2, std::int64_t n3);

/// Calls visit(tuple) for every (n1, n2, n3) in Gamma(n) with |n_i| <= box.
/// Order: n1 ascending, then n3 ascending.
void gamma_for_each(std::int64_t n, std::int64_t box,
                    const std::function<void(const PhaseTuple&)>& visit);
std::vector<PhaseTuple> gamma_enumerate(std::int64_t n, std::int64_t box);

struct PhaseCheckResult {
  std::uint64_t tuples = 0;
  std::uint64_t mismatches = 0;
};
/// Exhaustive phase_phi == phase_factorized over |n1|,|n2|,|n3| <= box.
PhaseCheckResult phase_check(std::int64_t box);

//---------------------------------------------------------------------------//
// Projectors and norms
//---------------------------------------------------------------------------//

enum class ProjectorKind { dirichlet, complement, dyadic };

// dirichlet: |n| <= level; complement: |n| > level (level -1 is identity);
// dyadic: block `level` with block 0 = {|n| <= 1}, block k = {2^k <= |n| < 2^{k+1}}.
SpectralField project(const SpectralField& f, ProjectorKind kind, int level);
// Dyadic block index of mode n.
int dyadic_block(int n);
// Number of dyadic blocks meeting [-N, N].
int dyadic_block_count(int cutoff);

struct NormSpec {
  double s = 0.0;
  double p = 2.0;  // use infinity() for sup norms
};

enum class NormFlavor { sobolev, fourier_lebesgue, physical };

double norm(const SpectralField& f, const NormSpec& spec, NormFlavor flavor);
inline double sobolev_norm(const SpectralField& f, double s) {
  return norm(f, NormSpec{s, 2.0}, NormFlavor::sobolev);
}

/// Samples f on M equispaced points x_j = 2 pi j / M.
std::vector<cplx> to_physical(const SpectralField& f, std::size_t points);
/// Physical L^p norm under dx/(2 pi) by equispaced quadrature on `points`
/// (at least 2(2N+1); for even integer p large enough the rule is exact).
double physical_lp_norm(const SpectralField& f, double p, std::size_t points);

//---------------------------------------------------------------------------//
// Cubic products
//---------------------------------------------------------------------------//

/// Grid size for alias-free cubic products of cutoff-N fields.
std::size_t dealiased_grid_size(int cutoff);

/// pi_N( f1 * conj(f2) * f3 ), evaluated on a dealiased FFT grid.
SpectralField cubic_product(const SpectralField& f1, const SpectralField& f2,
                            const SpectralField& f3);
/// Reference: direct sum over n1 - n2 + n3 = n. Serial, O(N^2) per mode.
SpectralField cubic_product_direct(const SpectralField& f1, const SpectralField& f2,
                                   const SpectralField& f3);

}  // namespace wnls
