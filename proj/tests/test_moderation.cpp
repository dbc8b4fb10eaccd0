#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <string>
#include <vector>

#include "pcm/errors.hpp"
#include "pcm/moderation.hpp"

namespace {

pcm::Thread mk_thread(const std::vector<double>& scores) {
  pcm::Thread t;
  t.post.id = "p1";
  t.post.community = "c";
  for (size_t i = 0; i < scores.size(); ++i) {
    pcm::Comment c;
    c.id = "c" + std::to_string(i + 1);
    c.post_id = "p1";
    c.author = "a";
    c.body = std::string(1, static_cast<char>('a' + i)) + std::string(1, static_cast<char>('a' + i));
    c.created_utc = static_cast<long long>(i);
    c.toxicity = scores[i];
    t.comments.push_back(std::move(c));
  }
  return t;
}

}  // namespace

TEST_CASE("apply_policy removes strictly above the threshold") {
  pcm::Thread t = mk_thread({0.2, 0.5, 0.9});

  pcm::ModeratedThread at05 = pcm::apply_policy(t, {0.5});
  REQUIRE(at05.removed_ids.size() == 1);  // 0.5 is not > 0.5
  CHECK(at05.removed_ids[0] == "c3");
  REQUIRE(at05.visible_comments.size() == 2);
  CHECK(at05.visible_comments[0].id == "c1");
  CHECK(at05.visible_comments[1].id == "c2");
  CHECK(at05.policy.threshold == 0.5);

  pcm::ModeratedThread at10 = pcm::apply_policy(t, {1.0});
  CHECK(at10.removed_ids.empty());
  CHECK(at10.visible_comments.size() == 3);

  pcm::ModeratedThread at01 = pcm::apply_policy(t, {0.1});
  CHECK(at01.visible_comments.empty());
  std::vector<std::string> all = {"c1", "c2", "c3"};
  CHECK(at01.removed_ids == all);

  // exactly-at-threshold comments stay
  pcm::Thread exact = mk_thread({0.5, 0.5});
  CHECK(pcm::apply_policy(exact, {0.5}).removed_ids.empty());
}

TEST_CASE("apply_policy keeps replies of removed comments") {
  pcm::Thread t = mk_thread({0.9, 0.1});
  t.comments[1].parent_id = "c1";  // reply under the toxic root
  pcm::ModeratedThread m = pcm::apply_policy(t, {0.5});
  REQUIRE(m.removed_ids.size() == 1);
  CHECK(m.removed_ids[0] == "c1");
  REQUIRE(m.visible_comments.size() == 1);
  CHECK(m.visible_comments[0].id == "c2");
}

TEST_CASE("apply_policy exempts pre-deleted comments") {
  pcm::Thread t = mk_thread({0.9});
  pcm::Comment gone;
  gone.id = "c9";
  gone.post_id = "p1";
  gone.body = "[deleted]";
  gone.pre_deleted = true;  // never scored, never hidden
  t.comments.push_back(gone);

  pcm::ModeratedThread m = pcm::apply_policy(t, {0.0});
  REQUIRE(m.removed_ids.size() == 1);
  CHECK(m.removed_ids[0] == "c1");
  REQUIRE(m.visible_comments.size() == 1);
  CHECK(m.visible_comments[0].id == "c9");
}

TEST_CASE("apply_policy requires scores") {
  pcm::Thread t = mk_thread({0.5});
  t.comments[0].toxicity.reset();
  try {
    pcm::apply_policy(t, {0.5});
    FAIL("expected unscored_comment");
  } catch (const pcm::error& e) {
    CHECK(e.code() == pcm::errc::unscored_comment);
  }
}

TEST_CASE("removed ids come back ascending") {
  pcm::Thread t = mk_thread({0.9, 0.1, 0.9, 0.9});
  // scramble ids so source order differs from sorted order
  t.comments[0].id = "z";
  t.comments[2].id = "a";
  t.comments[3].id = "m";
  pcm::ModeratedThread m = pcm::apply_policy(t, {0.5});
  std::vector<std::string> expect = {"a", "m", "z"};
  CHECK(m.removed_ids == expect);
}

TEST_CASE("removal_rate") {
  CHECK(pcm::removal_rate(mk_thread({0.2, 0.5, 0.9}), {1.0}) == 0.0);
  CHECK(pcm::removal_rate(mk_thread({0.2, 0.5, 0.9}), {0.0}) == 1.0);
  CHECK(pcm::removal_rate(mk_thread({0.9, 0.1, 0.1, 0.1}), {0.5}) == 0.25);

  pcm::Thread empty;
  CHECK(pcm::removal_rate(empty, {0.5}) == 0.0);
}

TEST_CASE("visible_text joins surviving bodies") {
  pcm::Thread t = mk_thread({0.2, 0.9, 0.3});  // bodies aa, bb, cc
  pcm::ModeratedThread m = pcm::apply_policy(t, {0.5});
  CHECK(pcm::visible_text(m) == "aa\ncc");

  // pre-deleted comments contribute no text even though they stay visible
  pcm::Thread with_gone = mk_thread({0.2});
  pcm::Comment gone;
  gone.id = "c9";
  gone.post_id = "p1";
  gone.body = "[removed]";
  gone.pre_deleted = true;
  with_gone.comments.push_back(gone);
  CHECK(pcm::visible_text(pcm::apply_policy(with_gone, {1.0})) == "aa");

  // everything removed leaves the empty document
  CHECK(pcm::visible_text(pcm::apply_policy(t, {0.0})) == "");
}

TEST_CASE("moderated_bodies renders placeholders in place") {
  pcm::Thread t = mk_thread({0.2, 0.9, 0.3});
  std::vector<std::string> lines = pcm::moderated_bodies(t, {0.5});
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "aa");
  CHECK(lines[1] == std::string(pcm::kRemovedPlaceholder));
  CHECK(lines[2] == "cc");
  CHECK(std::string(pcm::kRemovedPlaceholder) == "[removed-by-pcm]");
}

TEST_CASE("removed sets nest as the threshold loosens") {
  pcm::Thread t = mk_thread({0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95});
  for (double lo = 0.0; lo < 0.9; lo += 0.1) {
    pcm::ModeratedThread strict = pcm::apply_policy(t, {lo});
    pcm::ModeratedThread loose = pcm::apply_policy(t, {lo + 0.1});
    // every id removed at the looser threshold is removed at the stricter one
    for (const std::string& id : loose.removed_ids) {
      CHECK(std::find(strict.removed_ids.begin(), strict.removed_ids.end(), id) !=
            strict.removed_ids.end());
    }
    CHECK(pcm::removal_rate(t, {lo + 0.1}) <= pcm::removal_rate(t, {lo}));
  }
}
