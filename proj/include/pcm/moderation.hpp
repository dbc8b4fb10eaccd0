#pragma once

#include <string>
#include <vector>

#include "pcm/corpus.hpp"

namespace pcm {

// placeholder shown for comments hidden by a policy, distinct from the
// source-level "[deleted]" marker
inline constexpr const char* kRemovedPlaceholder = "[removed-by-pcm]";

struct ModerationPolicy {
  double threshold = 1.0;  // the user's toxicity tolerance
};

struct ModeratedThread {
  Post post;
  std::vector<Comment> visible_comments;  // source traversal order preserved
  std::vector<std::string> removed_ids;   // ascending
  ModerationPolicy policy;
};

// hide every comment whose toxicity strictly exceeds the threshold;
// replies to hidden comments stay unless independently hidden
ModeratedThread apply_policy(const Thread& thread, const ModerationPolicy& policy);

// |removed| / comment count; 0 for empty threads
double removal_rate(const Thread& thread, const ModerationPolicy& policy);

// surviving bodies (pre_deleted excluded) joined by single newlines
std::string visible_text(const ModeratedThread& mthread);

// per-comment display lines for the full thread: hidden comments render as
// the placeholder, everything else as its body
std::vector<std::string> moderated_bodies(const Thread& thread, const ModerationPolicy& policy);

}  // namespace pcm
