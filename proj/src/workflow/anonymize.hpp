#pragma once

#include <json.hpp>

namespace speakloop::workflow {

// Removes reviewer identity fields (reviewer_id, reviewer, author_id,
// rater_id) at any depth. Array order is preserved.
nlohmann::json AnonymizeFeedback(nlohmann::json bundle);

}  // namespace speakloop::workflow
