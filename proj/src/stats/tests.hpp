#pragma once

#include <span>
#include <vector>

namespace speakloop::stats {

// Regularized incomplete beta I_x(a, b), continued fraction (modified
// Lentz), converged to 1e-15 relative.
double RegularizedIncompleteBeta(double a, double b, double x);

// Two-tailed p of Student's t with `df` degrees of freedom.
double StudentTwoTailedP(double t, double df);

struct PairedSample {
  double pre = 0.0;
  double post = 0.0;
};

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p_two_tailed = 1.0;
  double mean_difference = 0.0;
  std::size_t n = 0;
};

// t = mean(d) sqrt(n) / sd(d) with d = post - pre. Throws kInvalidArgument
// for n < 2 and kDegenerate for zero variance of d.
TTestResult PairedTTest(std::span<const PairedSample> samples);

// (mean_a - mean_b) / pooled sd. Throws kInvalidArgument for groups
// smaller than 2 and kDegenerate for zero pooled variance.
double CohensD(std::span<const double> a, std::span<const double> b);

// (#{a > b} - #{a < b}) / (n_a n_b). Throws kInvalidArgument on an empty
// group.
double CliffsDelta(std::span<const double> a, std::span<const double> b);

double Mean(std::span<const double> values);
double SampleVariance(std::span<const double> values);
// Sample standard deviation (n - 1); 0 for fewer than two values.
double SampleSd(std::span<const double> values);

}  // namespace speakloop::stats
