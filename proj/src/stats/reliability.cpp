#include "stats/reliability.hpp"

#include "common/error.hpp"

namespace speakloop::stats {

SparseRatingMatrix::SparseRatingMatrix(std::vector<std::string> raters, std::vector<std::string> items,
                                       int scale_min, int scale_max)
    : raters_(std::move(raters)),
      items_(std::move(items)),
      scale_min_(scale_min),
      scale_max_(scale_max),
      cells_(raters_.size() * items_.size()) {
  if (scale_min_ > scale_max_) Fail(ErrorKind::kInvalidArgument, "rating matrix: empty ordinal scale");
}

void SparseRatingMatrix::Set(std::size_t rater, std::size_t item, std::optional<int> value) {
  if (rater >= raters_.size() || item >= items_.size())
    Fail(ErrorKind::kInvalidArgument, "rating matrix: index out of range");
  if (value && (*value < scale_min_ || *value > scale_max_))
    Fail(ErrorKind::kInvalidArgument, "rating matrix: value " + std::to_string(*value) + " off the scale");
  cells_[rater * items_.size() + item] = value;
}

double KrippendorffAlphaOrdinal(const SparseRatingMatrix& m) {
  const std::size_t k = static_cast<std::size_t>(m.scale_max() - m.scale_min() + 1);
  // coincidence matrix o[c][k]
  std::vector<double> o(k * k, 0.0);
  std::vector<std::size_t> counts(k);
  for (std::size_t item = 0; item < m.items().size(); ++item) {
    std::fill(counts.begin(), counts.end(), 0);
    std::size_t mu = 0;
    for (std::size_t r = 0; r < m.raters().size(); ++r) {
      if (auto v = m.At(r, item)) {
        ++counts[static_cast<std::size_t>(*v - m.scale_min())];
        ++mu;
      }
    }
    if (mu < 2) continue;
    const double w = 1.0 / static_cast<double>(mu - 1);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t d = 0; d < k; ++d) {
        if (counts[d] == 0) continue;
        const double pairs = c == d ? static_cast<double>(counts[c] * (counts[c] - 1))
                                    : static_cast<double>(counts[c] * counts[d]);
        o[c * k + d] += pairs * w;
      }
    }
  }
  std::vector<double> marginal(k, 0.0);
  double n = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) marginal[c] += o[c * k + d];
    n += marginal[c];
  }
  if (n <= 0.0) Fail(ErrorKind::kUndefinedStatistic, "alpha: no pairable values");

  // ordinal metric: (sum_{g=c..d} n_g - (n_c + n_d)/2)^2
  std::vector<double> cumulative(k + 1, 0.0);
  for (std::size_t c = 0; c < k; ++c) cumulative[c + 1] = cumulative[c] + marginal[c];
  auto delta2 = [&](std::size_t c, std::size_t d) {
    if (c == d) return 0.0;
    const std::size_t lo = std::min(c, d), hi = std::max(c, d);
    const double s = cumulative[hi + 1] - cumulative[lo] - (marginal[lo] + marginal[hi]) / 2.0;
    return s * s;
  };
  double observed = 0.0, expected = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) {
      const double dd = delta2(c, d);
      observed += o[c * k + d] * dd;
      expected += marginal[c] * marginal[d] * dd;
    }
  }
  observed /= n;
  expected /= n * (n - 1.0);
  if (expected <= 0.0) return 1.0;
  return 1.0 - observed / expected;
}

}  // namespace speakloop::stats
