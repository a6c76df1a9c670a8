#include "wnls/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace wnls {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FftBuffer::FftBuffer(std::size_t size) : size_(size) {
  if (size == 0) throw std::invalid_argument("FftBuffer: size must be positive");
  std::lock_guard lock(planner_mutex());
  auto* d = fftw_alloc_complex(size);
  data_ = d;
  const int n = static_cast<int>(size);
  plan_forward_ = fftw_plan_dft_1d(n, d, d, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_backward_ = fftw_plan_dft_1d(n, d, d, FFTW_BACKWARD, FFTW_ESTIMATE);
  std::fill_n(reinterpret_cast<cplx*>(d), size, cplx{});
}

FftBuffer::~FftBuffer() { release(); }

FftBuffer::FftBuffer(FftBuffer&& other) noexcept
    : size_(std::exchange(other.size_, 0)),
      data_(std::exchange(other.data_, nullptr)),
      plan_forward_(std::exchange(other.plan_forward_, nullptr)),
      plan_backward_(std::exchange(other.plan_backward_, nullptr)) {}

FftBuffer& FftBuffer::operator=(FftBuffer&& other) noexcept {
  if (this != &other) {
    release();
    size_ = std::exchange(other.size_, 0);
    data_ = std::exchange(other.data_, nullptr);
    plan_forward_ = std::exchange(other.plan_forward_, nullptr);
    plan_backward_ = std::exchange(other.plan_backward_, nullptr);
  }
  return *this;
}

void FftBuffer::release() {
  if (!data_) return;
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
  fftw_free(data_);
  data_ = nullptr;
}

std::span<cplx> FftBuffer::data() { return {reinterpret_cast<cplx*>(data_), size_}; }

void FftBuffer::forward() { fftw_execute(static_cast<fftw_plan>(plan_forward_)); }
void FftBuffer::backward() { fftw_execute(static_cast<fftw_plan>(plan_backward_)); }

void synthesize(const SpectralField& f, FftBuffer& buf) {
  auto x = buf.data();
  const auto m = static_cast<long>(buf.size());
  const int N = f.cutoff();
  if (2L * N + 1 > m) throw std::invalid_argument("synthesize: grid too small for field");
  // Coefficients are stored from -N to N; nonnegative modes go to the front, negative ones to the back.
  const auto c = f.coeffs();
  const auto n0 = static_cast<std::size_t>(N);
  std::copy(c.begin() + static_cast<long>(n0), c.end(), x.begin());
  std::fill(x.begin() + static_cast<long>(n0 + 1), x.end() - static_cast<long>(n0), cplx{});
  std::copy(c.begin(), c.begin() + static_cast<long>(n0), x.end() - static_cast<long>(n0));
  buf.backward();
}

void analyze(FftBuffer& buf, SpectralField& out) {
  buf.forward();
  auto x = buf.data();
  const auto m = static_cast<long>(buf.size());
  const double scale = 1.0 / static_cast<double>(m);
  const auto N = static_cast<std::size_t>(out.cutoff());
  if (2 * N + 1 > static_cast<std::size_t>(m)) throw std::invalid_argument("analyze: grid too small for field");
  auto o = out.coeffs();
  for (std::size_t j = 0; j < N; ++j) o[j] = x[static_cast<std::size_t>(m) - N + j] * scale;
  for (std::size_t j = 0; j <= N; ++j) o[N + j] = x[j] * scale;
}

CubicWorkspace::CubicWorkspace(int cutoff)
    : cutoff_(cutoff),
      a_(dealiased_grid_size(cutoff)),
      b_(dealiased_grid_size(cutoff)),
      c_(dealiased_grid_size(cutoff)) {}

void CubicWorkspace::product(const SpectralField& f1, const SpectralField& f2,
                             const SpectralField& f3, SpectralField& out) {
  synthesize(f1, a_);
  synthesize(f2, b_);
  synthesize(f3, c_);
  auto x = a_.data();
  auto y = b_.data();
  auto z = c_.data();
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = x[j] * std::conj(y[j]) * z[j];
  analyze(a_, out);
}

void CubicWorkspace::cube(const SpectralField& u, SpectralField& out) {
  synthesize(u, a_);
  auto x = a_.data();
  for (auto& v : x) v *= std::norm(v);
  analyze(a_, out);
}

CubicWorkspace& thread_cubic_workspace(int cutoff) {
  thread_local std::map<int, std::unique_ptr<CubicWorkspace>> cache;
  auto& slot = cache[cutoff];
  if (!slot) slot = std::make_unique<CubicWorkspace>(cutoff);
  return *slot;
}

}  // namespace wnls
