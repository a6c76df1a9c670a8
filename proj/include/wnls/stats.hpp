#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace wnls {

/// Constant samples, too few samples, or mismatched lengths.
class DegenerateSample : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov against Exp(1).
TestResult ks_exp1(std::vector<double> x);
/// One-sample Kolmogorov-Smirnov against U(0, 1).
TestResult ks_uniform(std::vector<double> x);
/// P(sqrt(n) D_n > d) for the Kolmogorov distribution, Stephens' small-sample correction.
double kolmogorov_pvalue(double d, std::size_t n);

/// Benjamini-Hochberg at level q: which hypotheses are rejected.
std::vector<bool> benjamini_hochberg(const std::vector<double>& p, double q);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};
/// Ordinary least squares y = a + b x with the standard error of b.
SlopeFit slope_fit(const std::vector<double>& x, const std::vector<double>& y);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Linear-interpolation quantile (type 7), q in [0, 1].
double quantile(std::vector<double> x, double q);
inline double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

double mean(const std::vector<double>& x);
/// Standard error of the mean.
double std_error(const std::vector<double>& x);

}  // namespace wnls
