#include "stats/tests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common/error.hpp"

namespace speakloop::stats {

namespace {

double BetaContinuedFraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  Fail(ErrorKind::kInternal, "incomplete beta: continued fraction did not converge");
}

}  // namespace

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) Fail(ErrorKind::kInvalidArgument, "incomplete beta: a, b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * BetaContinuedFraction(a, b, x) / a;
  return 1.0 - front * BetaContinuedFraction(b, a, 1.0 - x) / b;
}

double StudentTwoTailedP(double t, double df) {
  if (!(df > 0.0)) Fail(ErrorKind::kInvalidArgument, "t distribution: df must be positive");
  if (std::isinf(t)) return 0.0;
  return RegularizedIncompleteBeta(df / 2.0, 0.5, df / (df + t * t));
}

double Mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double SampleVariance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

double SampleSd(std::span<const double> v) { return std::sqrt(SampleVariance(v)); }

TTestResult PairedTTest(std::span<const PairedSample> samples) {
  if (samples.size() < 2) Fail(ErrorKind::kInvalidArgument, "paired t-test: need at least 2 pairs");
  std::vector<double> d;
  d.reserve(samples.size());
  for (const auto& s : samples) d.push_back(s.post - s.pre);
  const double sd = SampleSd(d);
  if (!(sd > 0.0)) Fail(ErrorKind::kDegenerate, "paired t-test: differences have zero variance");
  TTestResult r;
  r.n = d.size();
  r.mean_difference = Mean(d);
  r.df = static_cast<double>(r.n - 1);
  r.t = r.mean_difference * std::sqrt(static_cast<double>(r.n)) / sd;
  r.p_two_tailed = StudentTwoTailedP(r.t, r.df);
  return r;
}

double CohensD(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) Fail(ErrorKind::kInvalidArgument, "cohen's d: each group needs n >= 2");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double pooled =
      std::sqrt(((na - 1.0) * SampleVariance(a) + (nb - 1.0) * SampleVariance(b)) / (na + nb - 2.0));
  if (!(pooled > 0.0)) Fail(ErrorKind::kDegenerate, "cohen's d: zero pooled variance");
  return (Mean(a) - Mean(b)) / pooled;
}

double CliffsDelta(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) Fail(ErrorKind::kInvalidArgument, "cliff's delta: empty group");
  std::vector<double> sorted(b.begin(), b.end());
  std::sort(sorted.begin(), sorted.end());
  long long dominance = 0;
  for (double x : a) {
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x);
    dominance += below - above;
  }
  return static_cast<double>(dominance) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

}  // namespace speakloop::stats
