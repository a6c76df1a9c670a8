#include "wnls/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wnls {

namespace {

void require_spread(const std::vector<double>& x, const char* what) {
  if (x.size() < 2) throw DegenerateSample(std::string(what) + ": need at least 2 samples");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) throw DegenerateSample(std::string(what) + ": constant sample");
}

template <class Cdf>
TestResult ks(std::vector<double> x, Cdf cdf, const char* what) {
  require_spread(x, what);
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return {d, kolmogorov_pvalue(d, x.size())};
}

}  // namespace

double kolmogorov_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 1e-3) return 1.0;
  // Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 lambda^2}
  double sum = 0.0, sign = 1.0, prev = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) <= 1e-12 * std::abs(sum) || std::abs(term) <= 1e-300) return std::clamp(2.0 * sum, 0.0, 1.0);
    if (std::abs(term) > std::abs(prev) && k > 1) break;
    prev = term;
    sign = -sign;
  }
  // Series not yet converged: lambda is tiny.
  return 1.0;
}

TestResult ks_exp1(std::vector<double> x) {
  return ks(std::move(x), [](double v) { return v <= 0.0 ? 0.0 : -std::expm1(-v); }, "ks_exp1");
}

TestResult ks_uniform(std::vector<double> x) {
  return ks(std::move(x), [](double v) { return std::clamp(v, 0.0, 1.0); }, "ks_uniform");
}

std::vector<bool> benjamini_hochberg(const std::vector<double>& p, double q) {
  const std::size_t m = p.size();
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::size_t k = 0;  // largest rank with p_(k) <= k q / m
  for (std::size_t r = 0; r < m; ++r)
    if (p[idx[r]] <= static_cast<double>(r + 1) * q / static_cast<double>(m)) k = r + 1;
  std::vector<bool> rej(m, false);
  for (std::size_t r = 0; r < k; ++r) rej[idx[r]] = true;
  return rej;
}

SlopeFit slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DegenerateSample("slope_fit: x and y differ in length");
  require_spread(x, "slope_fit");
  const double n = static_cast<double>(x.size());
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return f;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DegenerateSample("pearson: x and y differ in length");
  require_spread(x, "pearson");
  require_spread(y, "pearson");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw DegenerateSample("quantile: empty sample");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q outside [0, 1]");
  std::sort(x.begin(), x.end());
  const double h = q * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double mean(const std::vector<double>& x) {
  if (x.empty()) throw DegenerateSample("mean: empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double std_error(const std::vector<double>& x) {
  if (x.size() < 2) throw DegenerateSample("std_error: need at least 2 samples");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

}  // namespace wnls
