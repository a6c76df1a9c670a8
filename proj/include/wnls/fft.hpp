#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "wnls/spectral.hpp"

namespace wnls {

/*!
 * In-place complex FFT of a fixed size, FFTW-backed.
 *
 * Plans are built with FFTW_ESTIMATE under a global lock so results do not
 * depend on timing measurements; execution is lock-free and each instance
 * owns its buffer, so one instance per thread is safe.
 */
class FftBuffer {
 public:
  explicit FftBuffer(std::size_t size);
  ~FftBuffer();
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;
  FftBuffer(FftBuffer&& other) noexcept;
  FftBuffer& operator=(FftBuffer&& other) noexcept;

  std::size_t size() const { return size_; }
  std::span<cplx> data();

  // x_j = sum_k a_k e^{+2 pi i jk/M}  (synthesis, no scaling)
  void backward();
  // a_k = sum_j x_j e^{-2 pi i jk/M}  (analysis, no scaling)
  void forward();

 private:
  void release();

  std::size_t size_ = 0;
  void* data_ = nullptr;
  void* plan_forward_ = nullptr;
  void* plan_backward_ = nullptr;
};

/// Loads mode n of f into slot n mod M (zeroing the rest) and synthesizes.
void synthesize(const SpectralField& f, FftBuffer& buf);
/// Analyzes buf and writes modes |n| <= cutoff, scaled by 1/M, into out.
void analyze(FftBuffer& buf, SpectralField& out);

/*!
 * Reusable workspace for cubic products at a fixed cutoff.
 *
 * Holds three synthesis buffers on the dealiased grid. Not thread-safe; the
 * free cubic_product() keeps one per thread.
 */
class CubicWorkspace {
 public:
  explicit CubicWorkspace(int cutoff);

  int cutoff() const { return cutoff_; }
  std::size_t grid_size() const { return a_.size(); }

  // out = pi_N(f1 conj(f2) f3); out must have this cutoff.
  void product(const SpectralField& f1, const SpectralField& f2, const SpectralField& f3,
               SpectralField& out);
  // out = pi_N(|u|^2 u), one synthesis.
  void cube(const SpectralField& u, SpectralField& out);

 private:
  int cutoff_;
  FftBuffer a_;
  FftBuffer b_;
  FftBuffer c_;
};

CubicWorkspace& thread_cubic_workspace(int cutoff);

}  // namespace wnls
