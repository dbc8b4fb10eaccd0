#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pcm {

struct Comment {
  std::string id;
  std::string post_id;
  std::optional<std::string> parent_id;  // absent for top-level comments
  std::string author;
  std::string body;
  long long created_utc = 0;
  std::optional<double> toxicity;  // absent until scored
  bool pre_deleted = false;        // source body was "[deleted]"/"[removed]"

  bool operator==(const Comment&) const = default;
};

struct Post {
  std::string id;
  std::string title;
  std::string selftext;
  long long created_utc = 0;
  std::string community;

  bool operator==(const Post&) const = default;
};

struct Thread {
  Post post;
  // depth-first preorder; siblings ordered by (created_utc, id); every
  // comment's parent_id refers to an earlier comment or is absent (root)
  std::vector<Comment> comments;

  long long comment_count() const { return static_cast<long long>(comments.size()); }
};

struct Corpus {
  std::string community;
  std::vector<Thread> threads;
  long long window_from = 0;  // inclusive
  long long window_to = 0;    // exclusive
};

struct CommunityStats {
  long long total_comments = 0;
  long long min_comments_per_post = 0;
  long long max_comments_per_post = 0;
  long long post_count = 0;
};

// one JSONL record -> Comment; strips "t1_".."t6_" link prefixes; a parent
// equal to the post id means top-level (parent_id absent)
Comment parse_comment_record(std::string_view line);

// one JSONL record -> Post (subreddit becomes community; num_comments is
// advisory in dumps and is ignored — threads are recounted)
Post parse_post_record(std::string_view line);

// inverse of parse_comment_record, for round-trip checks and re-export
std::string comment_to_record(const Comment& comment);

struct AssembleResult {
  std::vector<Thread> threads;   // one per post, post order preserved
  long long dropped_comments = 0;  // comments whose post is absent
};

// group comments under their posts and order each thread depth-first;
// orphaned comments (parent missing) re-parent to the post root, and
// parent cycles are broken deterministically by re-parenting the earliest
// (created_utc, id) participant
AssembleResult assemble_threads(const std::vector<Post>& posts,
                                const std::vector<Comment>& comments);

// threads with posts created inside [from, to), sorted by descending
// comment count then ascending post id, truncated to n
std::vector<Thread> select_top_posts(const std::vector<Thread>& threads, long long n,
                                     long long window_from, long long window_to);

CommunityStats corpus_stats(const Corpus& corpus);

}  // namespace pcm
