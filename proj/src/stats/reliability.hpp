#pragma once

#include <optional>
#include <string>
#include <vector>

namespace speakloop::stats {

// raters x items ordinal matrix; std::nullopt marks a missing cell.
class SparseRatingMatrix {
 public:
  SparseRatingMatrix(std::vector<std::string> raters, std::vector<std::string> items,
                     int scale_min = 1, int scale_max = 5);

  // Throws kInvalidArgument on an unknown index or an off-scale value.
  void Set(std::size_t rater, std::size_t item, std::optional<int> value);
  std::optional<int> At(std::size_t rater, std::size_t item) const {
    return cells_[rater * items_.size() + item];
  }

  const std::vector<std::string>& raters() const { return raters_; }
  const std::vector<std::string>& items() const { return items_; }
  int scale_min() const { return scale_min_; }
  int scale_max() const { return scale_max_; }

 private:
  std::vector<std::string> raters_;
  std::vector<std::string> items_;
  int scale_min_;
  int scale_max_;
  std::vector<std::optional<int>> cells_;
};

// Krippendorff's alpha with the ordinal difference metric, computed from the
// value-by-value coincidence matrix. Only items with at least two ratings
// are pairable. Throws kUndefinedStatistic when nothing is pairable; perfect
// agreement with zero expected disagreement returns 1.
double KrippendorffAlphaOrdinal(const SparseRatingMatrix& matrix);

}  // namespace speakloop::stats
