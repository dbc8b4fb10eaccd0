#include "pcm/moderation.hpp"

#include <algorithm>

#include "pcm/errors.hpp"

namespace pcm {

namespace {

// pre_deleted comments carry no text and are never hidden; everything else
// must have been scored before moderation
bool is_removed(const Comment& comment, double threshold) {
  if (comment.pre_deleted) return false;
  if (!comment.toxicity) throw error(errc::unscored_comment, comment.id);
  return *comment.toxicity > threshold;
}

}  // namespace

ModeratedThread apply_policy(const Thread& thread, const ModerationPolicy& policy) {
  ModeratedThread out;
  out.post = thread.post;
  out.policy = policy;
  for (const Comment& c : thread.comments) {
    if (is_removed(c, policy.threshold)) {
      out.removed_ids.push_back(c.id);
    } else {
      out.visible_comments.push_back(c);
    }
  }
  std::sort(out.removed_ids.begin(), out.removed_ids.end());
  return out;
}

double removal_rate(const Thread& thread, const ModerationPolicy& policy) {
  if (thread.comments.empty()) return 0.0;
  long long removed = 0;
  for (const Comment& c : thread.comments) {
    if (is_removed(c, policy.threshold)) ++removed;
  }
  return static_cast<double>(removed) / static_cast<double>(thread.comments.size());
}

std::string visible_text(const ModeratedThread& mthread) {
  std::string doc;
  bool first = true;
  for (const Comment& c : mthread.visible_comments) {
    if (c.pre_deleted) continue;
    if (!first) doc.push_back('\n');
    doc += c.body;
    first = false;
  }
  return doc;
}

std::vector<std::string> moderated_bodies(const Thread& thread,
                                          const ModerationPolicy& policy) {
  std::vector<std::string> lines;
  lines.reserve(thread.comments.size());
  for (const Comment& c : thread.comments) {
    lines.push_back(is_removed(c, policy.threshold) ? kRemovedPlaceholder : c.body);
  }
  return lines;
}

}  // namespace pcm
