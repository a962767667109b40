#include "workflow/anonymize.hpp"

namespace speakloop::workflow {

nlohmann::json AnonymizeFeedback(nlohmann::json bundle) {
  static const char* kIdentityKeys[] = {"reviewer_id", "reviewer", "author_id", "rater_id"};
  if (bundle.is_object()) {
    for (const char* key : kIdentityKeys) bundle.erase(key);
    for (auto& [k, v] : bundle.items()) v = AnonymizeFeedback(std::move(v));
  } else if (bundle.is_array()) {
    for (auto& v : bundle) v = AnonymizeFeedback(std::move(v));
  }
  return bundle;
}

}  // namespace speakloop::workflow
