#include "wnls/moments.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "wnls/random.hpp"

namespace wnls {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double normalisation(const MomentSpec& spec) {
  double f = 1.0;
  for (std::size_t j = 0; j < 3; ++j)
    if (spec.in_set[j]) f *= factorial(spec.k[j]);
  return f;
}

// Powers (a, b) of g_m and conj(g_m) in X_t, accumulated into `pw`.
void add_powers(const MomentSpec& spec, const MomentTerm& t, bool conjugate, std::map<int, std::array<int, 2>>& pw) {
  const int modes[3] = {t.n1, t.n2, t.n3};
  for (std::size_t j = 0; j < 3; ++j) {
    if (!spec.in_set[j]) continue;
    // |g|^{2k} g = g^{k+1} conj(g)^k; position 2 carries conj(g).
    int a = spec.k[j] + (j == 1 ? 0 : 1);
    int b = spec.k[j] + (j == 1 ? 1 : 0);
    if (conjugate) std::swap(a, b);
    auto& e = pw[modes[j]];
    e[0] += a;
    e[1] += b;
  }
}

}  // namespace

void MomentSpec::validate() const {
  for (int kj : k)
    if (kj < 0 || kj > 3) throw std::invalid_argument("multilinear_second_moment: k_j must be in [0, 3]");
  if (!in_set[0] && !in_set[1] && !in_set[2])
    throw std::invalid_argument("multilinear_second_moment: the index set must be non-empty");
  for (std::size_t j = 0; j < 3; ++j)
    if (!in_set[j] && k[j] != 0)
      throw std::invalid_argument("multilinear_second_moment: k_j given for a position outside the set");
  if (terms.empty()) return;
  const int n = terms.front().n1 - terms.front().n2 + terms.front().n3;
  for (const auto& t : terms) {
    if (t.n1 - t.n2 + t.n3 != n)
      throw std::invalid_argument("multilinear_second_moment: terms do not share one output mode");
    if (t.n1 == n || t.n3 == n) throw std::invalid_argument("multilinear_second_moment: term outside Gamma(n)");
  }
}

cplx moment_sum(const MomentSpec& spec, const std::function<cplx(int)>& g) {
  cplx sum{};
  for (const auto& t : spec.terms) {
    const int modes[3] = {t.n1, t.n2, t.n3};
    cplx x = t.c;
    for (std::size_t j = 0; j < 3; ++j) {
      if (!spec.in_set[j]) continue;
      const cplx gj = g(modes[j]);
      x *= std::pow(std::norm(gj), spec.k[j]) * (j == 1 ? std::conj(gj) : gj);
    }
    sum += x;
  }
  return sum / normalisation(spec);
}

double second_moment_exact(const MomentSpec& spec) {
  spec.validate();
  double total = 0.0;
  for (const auto& t : spec.terms)
    for (const auto& u : spec.terms) {
      std::map<int, std::array<int, 2>> pw;
      add_powers(spec, t, false, pw);
      add_powers(spec, u, true, pw);
      double e = 1.0;
      for (const auto& [m, ab] : pw) {
        if (ab[0] != ab[1]) {
          e = 0.0;
          break;
        }
        e *= factorial(ab[0]);
      }
      if (e != 0.0) total += e * (t.c * std::conj(u.c)).real();
    }
  const double nrm = normalisation(spec);
  return total / (nrm * nrm);
}

MomentEstimate multilinear_second_moment(const MomentSpec& spec, std::size_t samples, std::uint64_t master_seed) {
  spec.validate();
  if (samples < 2) throw std::invalid_argument("multilinear_second_moment: need at least 2 samples");
  std::vector<double> v(samples);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < samples; ++i) {
    const std::uint64_t seed = derive_trajectory_seed(master_seed, i);
    v[i] = std::norm(moment_sum(spec, [seed](int n) { return gaussian_mode(seed, n); }));
  }
  MomentEstimate r;
  r.samples = samples;
  double s = 0.0;
  for (double x : v) s += x;
  r.mean = s / static_cast<double>(samples);
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.std_error = std::sqrt(ss / static_cast<double>(samples - 1) / static_cast<double>(samples));
  r.exact = second_moment_exact(spec);
  double c2 = 0.0;
  for (const auto& t : spec.terms) c2 += std::norm(t.c);
  r.bound = 2.0 * std::pow(kMomentConstant, 2 * spec.degree()) * c2;
  return r;
}

}  // namespace wnls
