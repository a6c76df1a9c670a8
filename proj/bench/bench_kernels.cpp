// Timings of the hot kernels, parallel path against the serial reference
// where one exists. Usage: bench_kernels [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "wnls/energy.hpp"
#include "wnls/flow.hpp"
#include "wnls/nonlinear.hpp"
#include "wnls/random.hpp"
#include "wnls/s_functionals.hpp"
#include "wnls/space_time.hpp"
#include "wnls/spectral.hpp"

using namespace wnls;

namespace {

double seconds(const std::function<void()>& f, int repeats) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / repeats;
}

void row(const std::string& name, double s) { std::printf("%-44s %12.6f s\n", name.c_str(), s); }

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif
  volatile double sink = 0.0;

  for (int N : {16, 32, 64}) {
    const SpectralField u = sample_data(11, N, 0.0);
    row("cubic_product FFT          N=" + std::to_string(N),
        seconds([&] { sink = sink + cubic_product(u, u, u).mass(); }, 20 * repeats));
    row("cubic_product direct (ref) N=" + std::to_string(N),
        seconds([&] { sink = sink + cubic_product_direct(u, u, u).mass(); }, repeats));
  }

  for (int N : {16, 32}) {
    const GaussianEnsemble e(5, N);
    const SpectralField u = sample_data(e);
    const RandomPhaseSpec phases{&e, N, 1};
    row("gauged_nonlin (Gamma sum)  N=" + std::to_string(N),
        seconds([&] { sink = sink + gauged_nonlin(u, 0.1, phases).non_resonant.mass(); }, repeats));
  }

  {
    const GaussianEnsemble e(3, 16);
    FlowSpec fs;
    fs.variant = FlowVariant::gauged_truncated;
    fs.cutoff = 16;
    fs.t_end = 0.01;
    fs.step_tolerance = 1e-6;
    row("evolve gauged N=16 to t=0.01", seconds([&] { sink = sink + evolve_truncated(sample_data(e), fs, &e).steps; }, repeats));
  }

  {
    const GaussianEnsemble e(9, 12);
    FlowSpec fs;
    fs.variant = FlowVariant::gauged_truncated;
    fs.cutoff = 12;
    fs.t_end = 0.02;
    fs.sample_interval = 4e-5;
    fs.step_tolerance = 1e-8;
    const SpaceTimeField w = SpaceTimeField::from_trajectory(evolve_truncated(sample_data(e), fs, &e));
    const RandomPhaseSpec phases{&e, 12, 1};
    row("energy_increment_table N=12, 501 samples",
        seconds([&] { sink = sink + energy_increment_table(w, phases)[0].back(); }, repeats));
  }

  for (int j = 1; j <= 3; ++j) {
    const GaussianEnsemble e(21, 8);
    SFunctionalSpec spec;
    spec.j = j;
    spec.box = 8;
    row("s_functional GL            j=" + std::to_string(j) + " box=8",
        seconds([&] { sink = sink + s_functional(spec, e); }, repeats));
    row("s_functional Simpson (ref) j=" + std::to_string(j) + " box=8",
        seconds([&] { sink = sink + s_functional(spec, e, TauQuadrature::uniform_simpson); }, 1));
  }
  return sink == 12345.0;  // keeps the work observable
}
