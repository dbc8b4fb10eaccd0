#include "pcm/corpus.hpp"

#include <algorithm>
#include <cstdlib>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "pcm/errors.hpp"

namespace pcm {

namespace {

using json = nlohmann::json;

std::string strip_link_prefix(std::string id) {
  if (id.size() >= 3 && id[0] == 't' && id[1] >= '1' && id[1] <= '6' && id[2] == '_') {
    return id.substr(3);
  }
  return id;
}

json parse_line(std::string_view line) {
  json rec = json::parse(line, nullptr, false);
  if (rec.is_discarded() || !rec.is_object()) {
    throw error(errc::malformed_record, "not a JSON object record");
  }
  return rec;
}

std::string require_string(const json& rec, const char* name) {
  auto it = rec.find(name);
  if (it == rec.end() || it->is_null()) throw error(errc::missing_field, name);
  if (!it->is_string()) throw error(errc::malformed_record, std::string(name) + " is not a string");
  return it->get<std::string>();
}

long long require_timestamp(const json& rec, const char* name) {
  auto it = rec.find(name);
  if (it == rec.end() || it->is_null()) throw error(errc::missing_field, name);
  if (it->is_number_integer() || it->is_number_unsigned()) return it->get<long long>();
  if (it->is_number_float()) {
    double v = it->get<double>();
    long long i = static_cast<long long>(v);
    if (static_cast<double>(i) == v) return i;
    throw error(errc::bad_timestamp, std::string(name) + " is not an integer");
  }
  if (it->is_string()) {
    // dumps sometimes carry epoch seconds as a decimal string
    const std::string s = it->get<std::string>();
    if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos) {
      return std::strtoll(s.c_str(), nullptr, 10);
    }
  }
  throw error(errc::bad_timestamp, std::string(name) + " is not an integer");
}

}  // namespace

Comment parse_comment_record(std::string_view line) {
  json rec = parse_line(line);
  Comment c;
  c.id = strip_link_prefix(require_string(rec, "id"));
  c.post_id = strip_link_prefix(require_string(rec, "link_id"));
  c.body = require_string(rec, "body");
  c.author = require_string(rec, "author");
  c.created_utc = require_timestamp(rec, "created_utc");
  auto parent = rec.find("parent_id");
  if (parent != rec.end() && parent->is_string()) {
    std::string p = strip_link_prefix(parent->get<std::string>());
    if (p != c.post_id) c.parent_id = std::move(p);
  }
  c.pre_deleted = (c.body == "[deleted]" || c.body == "[removed]");
  return c;
}

Post parse_post_record(std::string_view line) {
  json rec = parse_line(line);
  Post p;
  p.id = strip_link_prefix(require_string(rec, "id"));
  p.title = require_string(rec, "title");
  p.selftext = require_string(rec, "selftext");
  p.created_utc = require_timestamp(rec, "created_utc");
  p.community = require_string(rec, "subreddit");
  return p;
}

std::string comment_to_record(const Comment& comment) {
  json rec;
  rec["id"] = comment.id;
  rec["link_id"] = "t3_" + comment.post_id;
  rec["parent_id"] =
      comment.parent_id ? "t1_" + *comment.parent_id : "t3_" + comment.post_id;
  rec["body"] = comment.body;
  rec["author"] = comment.author;
  rec["created_utc"] = comment.created_utc;
  return rec.dump();
}

AssembleResult assemble_threads(const std::vector<Post>& posts,
                                const std::vector<Comment>& comments) {
  std::unordered_set<std::string> post_ids;
  for (const auto& p : posts) {
    if (!post_ids.insert(p.id).second) throw error(errc::duplicate_post_id, p.id);
  }
  std::unordered_set<std::string> comment_ids;
  std::unordered_map<std::string, std::vector<const Comment*>> by_post;
  AssembleResult result;
  for (const auto& c : comments) {
    if (!comment_ids.insert(c.id).second) throw error(errc::duplicate_comment_id, c.id);
    if (!post_ids.count(c.post_id)) {
      ++result.dropped_comments;
      continue;
    }
    by_post[c.post_id].push_back(&c);
  }

  auto order_key = [](const Comment* c) { return std::make_pair(c->created_utc, c->id); };

  result.threads.reserve(posts.size());
  for (const auto& post : posts) {
    Thread thread;
    thread.post = post;
    auto it = by_post.find(post.id);
    if (it == by_post.end()) {
      result.threads.push_back(std::move(thread));
      continue;
    }
    const auto& pool = it->second;
    std::unordered_set<std::string> ids;
    ids.reserve(pool.size());
    for (const Comment* c : pool) ids.insert(c->id);

    // root set: top-level comments plus orphans whose parent is missing
    std::unordered_map<std::string, std::vector<const Comment*>> children;
    std::vector<const Comment*> roots;
    for (const Comment* c : pool) {
      if (c->parent_id && ids.count(*c->parent_id)) {
        children[*c->parent_id].push_back(c);
      } else {
        roots.push_back(c);
      }
    }
    auto by_order = [&](const Comment* a, const Comment* b) {
      return order_key(a) < order_key(b);
    };
    std::sort(roots.begin(), roots.end(), by_order);
    for (auto& [parent, kids] : children) std::sort(kids.begin(), kids.end(), by_order);

    std::unordered_set<std::string> rerooted;  // orphans and cycle breaks
    for (const Comment* c : roots) {
      if (c->parent_id) rerooted.insert(c->id);
    }

    std::vector<const Comment*> ordered;
    ordered.reserve(pool.size());
    auto traverse = [&](const std::vector<const Comment*>& from_roots) {
      std::vector<const Comment*> stack(from_roots.rbegin(), from_roots.rend());
      while (!stack.empty()) {
        const Comment* c = stack.back();
        stack.pop_back();
        ordered.push_back(c);
        auto kit = children.find(c->id);
        if (kit != children.end()) {
          for (auto rit = kit->second.rbegin(); rit != kit->second.rend(); ++rit) {
            stack.push_back(*rit);
          }
        }
      }
    };
    traverse(roots);

    // parent cycles never get reached from the roots; break each by
    // re-parenting its earliest (created_utc, id) member to the post root
    while (ordered.size() < pool.size()) {
      std::unordered_set<std::string> seen;
      for (const Comment* c : ordered) seen.insert(c->id);
      const Comment* breaker = nullptr;
      for (const Comment* c : pool) {
        if (seen.count(c->id)) continue;
        if (!breaker || order_key(c) < order_key(breaker)) breaker = c;
      }
      rerooted.insert(breaker->id);
      // detach from its old parent and traverse the freed subtree
      auto& siblings = children[*breaker->parent_id];
      siblings.erase(std::find(siblings.begin(), siblings.end(), breaker));
      traverse({breaker});
    }

    thread.comments.reserve(ordered.size());
    for (const Comment* c : ordered) {
      Comment copy = *c;
      if (rerooted.count(copy.id)) copy.parent_id.reset();
      thread.comments.push_back(std::move(copy));
    }
    result.threads.push_back(std::move(thread));
  }
  return result;
}

std::vector<Thread> select_top_posts(const std::vector<Thread>& threads, long long n,
                                     long long window_from, long long window_to) {
  std::vector<const Thread*> eligible;
  for (const auto& t : threads) {
    if (t.post.created_utc >= window_from && t.post.created_utc < window_to) {
      eligible.push_back(&t);
    }
  }
  std::sort(eligible.begin(), eligible.end(), [](const Thread* a, const Thread* b) {
    if (a->comment_count() != b->comment_count())
      return a->comment_count() > b->comment_count();
    return a->post.id < b->post.id;
  });
  if (n < 0) n = 0;
  if (static_cast<size_t>(n) < eligible.size()) eligible.resize(static_cast<size_t>(n));
  std::vector<Thread> out;
  out.reserve(eligible.size());
  for (const Thread* t : eligible) out.push_back(*t);
  return out;
}

CommunityStats corpus_stats(const Corpus& corpus) {
  if (corpus.threads.empty()) throw error(errc::empty_corpus, "corpus has no threads");
  CommunityStats stats;
  stats.post_count = static_cast<long long>(corpus.threads.size());
  stats.min_comments_per_post = corpus.threads.front().comment_count();
  stats.max_comments_per_post = stats.min_comments_per_post;
  for (const auto& t : corpus.threads) {
    long long c = t.comment_count();
    stats.total_comments += c;
    stats.min_comments_per_post = std::min(stats.min_comments_per_post, c);
    stats.max_comments_per_post = std::max(stats.max_comments_per_post, c);
  }
  return stats;
}

}  // namespace pcm
