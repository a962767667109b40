#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "media/series.hpp"
#include "moderation/comment.hpp"
#include "moderation/pos_tagger.hpp"

namespace speakloop::moderation {

using SeriesMap = std::map<media::Signal, media::BehaviorSeries>;

inline constexpr std::array<double, 3> kWindowWidths{1.0, 2.0, 4.0};
inline constexpr std::size_t kSignalCount = 4;
inline constexpr std::size_t kWindowCount = kWindowWidths.size();

struct WindowFeature {
  double mean = 0.0;
  double sd = 0.0;
  bool missing = true;
  bool operator==(const WindowFeature&) const = default;
};

struct CommentFeatures {
  std::size_t char_count = 0;
  bool has_punctuation = false;
  bool has_capitals = false;
  std::array<std::size_t, kCoarseTagCount> pos_counts{};
  // [signal][window], signals in media::kAllSignals order.
  std::array<std::array<WindowFeature, kWindowCount>, kSignalCount> multimodal{};
  bool operator==(const CommentFeatures&) const = default;
};

// Layout of the dense vector handed to the regression: 8 text features,
// mean and sd per (signal, window) with missing values imputed as 0, then one
// missing indicator per window width that is set when any signal lacked
// samples at that width.
inline constexpr std::string_view kFeatureLayoutVersion = "helpfulness-features/1";
inline constexpr std::size_t kTextFeatureCount = 3 + kCoarseTagCount;
inline constexpr std::size_t kFeatureDimension =
    kTextFeatureCount + 2 * kSignalCount * kWindowCount + kWindowCount;

const std::vector<std::string>& FeatureNames();

// Windows are centered on the comment's video timestamp; an untimed comment
// has every multimodal slot missing. Throws kInvalidArgument when one of the
// four signals is absent from `series`.
CommentFeatures ExtractFeatures(const Comment& comment, const SeriesMap& series);

std::vector<double> FeatureVector(const CommentFeatures& features);

}  // namespace speakloop::moderation
