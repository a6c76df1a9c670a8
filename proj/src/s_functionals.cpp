#include "wnls/s_functionals.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "wnls/quadrature.hpp"
#include "wnls/spectral.hpp"
#include "wnls/window.hpp"

namespace wnls {

namespace {

constexpr int kNodes = 20;

const GaussRule& rule() {
  static const GaussRule r = gauss_legendre(kNodes);
  return r;
}

double weight(double tau, double b) { return std::pow(1.0 + tau * tau, -b); }

double cluster_value(const std::vector<ShiftedTerm>& t, std::size_t lo, std::size_t hi, double tau,
                     const EtaCutoff& win) {
  cplx v{};
  for (std::size_t i = lo; i < hi; ++i) v += t[i].a * win.hat(tau + t[i].c);
  return std::norm(v);
}

// Graded composite GL panels on a fixed partition of [-extent, extent]:
// panels are at most 4 pi/delta long (about four periods of a product of
// transforms at 20 nodes) and shrink to 0.25 near tau = 0, where <tau>^{-2b} has poles at
// +-i. The weight <tau>^{-2b} is folded into the node weights once.
struct TauGrid {
  std::vector<double> edges;  // panel boundaries, ascending
  std::vector<double> tau;    // kNodes per panel
  std::vector<double> wt;

  TauGrid(double delta, double b, double extent) {
    const double lmax = 4.0 * M_PI / delta;
    std::vector<double> pos{0.0};
    while (pos.back() < extent) pos.push_back(pos.back() + std::clamp(pos.back() / 2.0, 0.25, lmax));
    for (std::size_t i = pos.size(); i-- > 1;) edges.push_back(-pos[i]);
    edges.insert(edges.end(), pos.begin(), pos.end());
    const auto& g = rule();
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      const double mid = 0.5 * (edges[p] + edges[p + 1]), half = 0.5 * (edges[p + 1] - edges[p]);
      for (int k = 0; k < kNodes; ++k) {
        const double x = mid + half * g.x[static_cast<std::size_t>(k)];
        tau.push_back(x);
        wt.push_back(half * g.w[static_cast<std::size_t>(k)] * weight(x, b));
      }
    }
  }
};

// Terms sorted by c; a panel only visits the terms whose windows [-c - W, -c + W] overlap it.
double gl_integral(const std::vector<ShiftedTerm>& t, const TauGrid& grid, const EtaCutoff& win) {
  const double W = win.tau_radius();
  const double lo = -t.back().c - W, hi = -t.front().c + W;
  if (lo < grid.edges.front() || hi > grid.edges.back())
    throw std::logic_error("s_functional: tau grid does not cover the terms");
  auto by_c = [](const ShiftedTerm& x, double c) { return x.c < c; };
  std::size_t p = static_cast<std::size_t>(std::upper_bound(grid.edges.begin(), grid.edges.end(), lo) - grid.edges.begin());
  p = p == 0 ? 0 : p - 1;
  double sum = 0.0;
  for (; p + 1 < grid.edges.size() && grid.edges[p] < hi; ++p) {
    const double x0 = grid.edges[p], x1 = grid.edges[p + 1];
    const auto a = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), -x1 - W, by_c) - t.begin());
    const auto z = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), -x0 + W, by_c) - t.begin());
    if (a >= z) continue;
    for (std::size_t k = p * kNodes; k < (p + 1) * kNodes; ++k)
      sum += grid.wt[k] * cluster_value(t, a, z, grid.tau[k], win);
  }
  return sum;
}

double simpson_integral(const std::vector<ShiftedTerm>& t, double lo, double hi, const EtaCutoff& win,
                        double b) {
  const double target = std::min(1.0, win.delta()) / 8.0;
  auto m = static_cast<std::size_t>(std::ceil((hi - lo) / target));
  m += m % 2;
  const double h = (hi - lo) / static_cast<double>(m);
  double sum = 0.0;
  for (std::size_t k = 0; k <= m; ++k) {
    const double tau = lo + static_cast<double>(k) * h;
    const double c = (k == 0 || k == m) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    sum += c * cluster_value(t, 0, t.size(), tau, win) * weight(tau, b);
  }
  return sum * h / 3.0;
}

}  // namespace

namespace {

double extent_of(const std::vector<ShiftedTerm>& terms, double W) {
  double m = 0.0;
  for (const auto& t : terms) m = std::max(m, std::abs(t.c));
  return m + W + 1.0;
}

double integrate_group(std::vector<ShiftedTerm> t, const EtaCutoff& win, double b, TauQuadrature quad,
                       const TauGrid* grid) {
  if (t.empty()) return 0.0;
  const double W = win.tau_radius();
  std::sort(t.begin(), t.end(), [](const ShiftedTerm& x, const ShiftedTerm& y) { return x.c < y.c; });
  if (quad == TauQuadrature::uniform_simpson) return simpson_integral(t, -t.back().c - W, -t.front().c + W, win, b);
  // Windows that do not overlap contribute no cross terms; integrate each cluster separately.
  double total = 0.0;
  std::size_t a = 0;
  while (a < t.size()) {
    std::size_t z = a + 1;
    while (z < t.size() && t[z].c - t[z - 1].c < 2.0 * W) ++z;
    const std::vector<ShiftedTerm> cluster(t.begin() + static_cast<long>(a), t.begin() + static_cast<long>(z));
    total += gl_integral(cluster, *grid, win);
    a = z;
  }
  return total;
}

}  // namespace

double shifted_window_integral(const std::vector<ShiftedTerm>& terms, double delta, double b, TauQuadrature quad) {
  if (terms.empty()) return 0.0;
  const EtaCutoff win(delta);
  if (quad == TauQuadrature::uniform_simpson) return integrate_group(terms, win, b, quad, nullptr);
  const TauGrid grid(delta, b, extent_of(terms, win.tau_radius()));
  return integrate_group(terms, win, b, quad, &grid);
}

std::vector<std::vector<ShiftedTerm>> s_functional_groups(const SFunctionalSpec& spec, const GaussianEnsemble& e) {
  if (spec.j < 1 || spec.j > 3) throw std::invalid_argument("s_functional: j must be 1, 2 or 3");
  if (spec.box < 0) throw std::invalid_argument("s_functional: box must be >= 0");
  if (!(spec.delta > 0.0)) throw std::invalid_argument("s_functional: delta must be > 0");
  if (e.cutoff() < spec.box) throw std::invalid_argument("s_functional: ensemble does not cover the box");
  const int B = spec.box;
  auto f = [&](int k, int n) -> cplx {
    if (std::abs(n) <= spec.high_pass[static_cast<std::size_t>(k)]) return {};
    return e.g(n);
  };
  auto g2 = [&](int n) { return e.intensity(n, B); };
  auto js = [&](int n, double p) { return std::pow(bracket(n), -p * spec.s); };
  std::vector<std::vector<ShiftedTerm>> groups;
  for (int n = -B; n <= B; ++n) {
    if (spec.j == 3) {
      std::vector<ShiftedTerm> grp;
      gamma_for_each(n, B, [&](const PhaseTuple& q) {
        const int n1 = static_cast<int>(q.n1), n2 = static_cast<int>(q.n2), n3 = static_cast<int>(q.n3);
        const cplx a = f(0, n1) * std::conj(f(1, n2)) * f(2, n3);
        if (a == cplx{}) return;
        grp.push_back({a * js(n, 2), static_cast<double>(q.phi) - g2(n1) + g2(n2) - g2(n3)});
      });
      if (!grp.empty()) groups.push_back(std::move(grp));
      continue;
    }
    for (int n3 = -B; n3 <= B; ++n3) {
      if (n3 == n) continue;
      if (spec.j == 2) {
        std::vector<ShiftedTerm> grp;
        for (int n1 = -B; n1 <= B; ++n1) {
          const int n2 = n1 + n3 - n;
          if (n1 == n || n2 < -B || n2 > B) continue;
          const cplx a = f(0, n1) * std::conj(f(1, n2));
          if (a == cplx{}) continue;
          grp.push_back({a * js(n3, 1) * js(n, 2),
                         static_cast<double>(phase_phi(n1, n2, n3)) - g2(n1) + g2(n2)});
        }
        if (!grp.empty()) groups.push_back(std::move(grp));
        continue;
      }
      // j = 1: n1 = n - n3 + n2 is the only surviving term.
      for (int n2 = -B; n2 <= B; ++n2) {
        const int n1 = n - n3 + n2;
        if (n1 == n || n1 < -B || n1 > B) continue;
        const cplx a = f(0, n1);
        if (a == cplx{}) continue;
        groups.push_back({{a * js(n2, 1) * js(n3, 1) * js(n, 2), static_cast<double>(phase_phi(n1, n2, n3)) - g2(n1)}});
      }
    }
  }
  return groups;
}

double s_functional(const SFunctionalSpec& spec, const GaussianEnsemble& e, TauQuadrature quad) {
  const auto groups = s_functional_groups(spec, e);
  const EtaCutoff win(spec.delta);
  double extent = 0.0;
  for (const auto& g : groups) extent = std::max(extent, extent_of(g, win.tau_radius()));
  std::optional<TauGrid> grid;
  if (quad == TauQuadrature::gauss_legendre) grid.emplace(spec.delta, spec.b, extent);
  // Per-group values first, then a serial sum: the result must not depend on the thread count.
  std::vector<double> part(groups.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t i = 0; i < groups.size(); ++i)
    part[i] = integrate_group(groups[i], win, spec.b, quad, grid ? &*grid : nullptr);
  double total = 0.0;
  for (double v : part) total += v;
  return std::sqrt(total);
}

}  // namespace wnls
