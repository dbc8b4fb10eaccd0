#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "pcm/corpus.hpp"
#include "pcm/errors.hpp"
#include "pcm/hash.hpp"
#include "pcm/ingest.hpp"
#include "pcm/metrics.hpp"
#include "pcm/sweep.hpp"
#include "pcm/textpipe.hpp"
#include "pcm/toxicity.hpp"

namespace {

pcm::Thread mini3() {
  pcm::Thread t;
  t.post.id = "p1";
  t.post.community = "mini";
  const char* bodies[] = {"alpha beta beta gamma", "beta gamma delta",
                          "gamma epsilon zeta zeta"};
  const double scores[] = {0.2, 0.5, 0.9};
  for (int i = 0; i < 3; ++i) {
    pcm::Comment c;
    c.id = "c" + std::to_string(i + 1);
    c.post_id = "p1";
    c.author = "a";
    c.body = bodies[i];
    c.created_utc = i;
    c.toxicity = scores[i];
    t.comments.push_back(std::move(c));
  }
  return t;
}

pcm::Corpus mini_corpus() {
  pcm::Corpus corpus;
  corpus.community = "mini";
  corpus.threads.push_back(mini3());
  return corpus;
}

pcm::Corpus fixture_corpus() {
  std::string base = std::string(PCM_SOURCE_DIR) + "/tests/fixtures/";
  auto posts = pcm::read_posts_jsonl(base + "fixture_posts.jsonl");
  auto comments = pcm::read_comments_jsonl(base + "fixture_comments.jsonl");
  pcm::AssembleResult r = pcm::assemble_threads(posts, comments);
  pcm::Corpus corpus;
  corpus.community = "fixture";
  corpus.window_from = 1654041600;
  corpus.window_to = 1672531200;
  corpus.threads = pcm::select_top_posts(r.threads, 5, corpus.window_from, corpus.window_to);
  return corpus;
}

std::unique_ptr<pcm::LexiconScorer> fixture_scorer(const pcm::PipelineConfig& pipe) {
  std::string lex = std::string(PCM_SOURCE_DIR) + "/tests/fixtures/fixture_lexicon.txt";
  return std::make_unique<pcm::LexiconScorer>(lex, pipe);
}

// forwards to a TfProvider while hiding its concrete type, forcing the
// generic string-embedding path through the sweep
class OpaqueProvider : public pcm::EmbeddingProvider {
 public:
  explicit OpaqueProvider(pcm::TfProvider& inner) : inner_(inner) {}
  pcm::EmbeddingVector embed(const std::string& text) override { return inner_.embed(text); }
  const std::string& id() const override { return inner_.id(); }

 private:
  pcm::TfProvider& inner_;
};

const pcm::SweepRow* find_row(const std::vector<pcm::SweepRow>& rows,
                              const std::string& post_id, double threshold) {
  for (const auto& r : rows) {
    if (r.post_id == post_id && r.threshold == threshold) return &r;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("threshold grid points") {
  pcm::ThresholdGrid grid;  // defaults 0.01..0.99 by 0.01
  std::vector<double> pts = grid.points();
  REQUIRE(pts.size() == 99);
  CHECK(pts.front() == 0.01);
  CHECK(pts.back() == 0.99);
  for (size_t i = 1; i < pts.size(); ++i) CHECK(pts[i] > pts[i - 1]);
  // grid values are exact multiples at 1e-9 resolution
  CHECK(pts[49] == 0.5);

  pcm::ThresholdGrid single{1.0, 1.0, 0.01};
  std::vector<double> one = single.points();
  REQUIRE(one.size() == 1);
  CHECK(one[0] == 1.0);

  pcm::ThresholdGrid coarse{0.1, 0.9, 0.4};
  std::vector<double> three = coarse.points();
  REQUIRE(three.size() == 3);
  CHECK(three[0] == 0.1);
  CHECK(three[1] == 0.5);
  CHECK(three[2] == 0.9);
}

TEST_CASE("threshold grid validation") {
  CHECK_THROWS_AS((pcm::ThresholdGrid{-0.1, 0.5, 0.1}.points()), pcm::error);
  CHECK_THROWS_AS((pcm::ThresholdGrid{0.0, 1.5, 0.1}.points()), pcm::error);
  CHECK_THROWS_AS((pcm::ThresholdGrid{0.5, 0.1, 0.1}.points()), pcm::error);
  CHECK_THROWS_AS((pcm::ThresholdGrid{0.1, 0.9, 0.0}.points()), pcm::error);
  CHECK_THROWS_AS((pcm::ThresholdGrid{0.1, 0.9, -0.1}.points()), pcm::error);
  try {
    pcm::ThresholdGrid{0.1, 0.9, 1e-10}.points();  // below grid resolution
    FAIL("expected config_error");
  } catch (const pcm::error& e) {
    CHECK(e.code() == pcm::errc::config_error);
  }
}

TEST_CASE("thread_document joins visible bodies") {
  pcm::Thread t = mini3();
  CHECK(pcm::thread_document(t) ==
        "alpha beta beta gamma\nbeta gamma delta\ngamma epsilon zeta zeta");

  pcm::Comment gone;
  gone.id = "c9";
  gone.post_id = "p1";
  gone.body = "[deleted]";
  gone.pre_deleted = true;
  t.comments.push_back(gone);
  CHECK(pcm::thread_document(t) ==
        "alpha beta beta gamma\nbeta gamma delta\ngamma epsilon zeta zeta");
}

TEST_CASE("corpus_vocab collects sorted distinct tokens") {
  pcm::Corpus corpus = mini_corpus();
  pcm::PipelineConfig pipe = pcm::default_pipeline();
  std::vector<std::string> expect = {"alpha", "beta", "delta", "epsilon", "gamma", "zeta"};
  CHECK(pcm::corpus_vocab(corpus, pipe) == expect);
}

TEST_CASE("score_corpus fills missing scores through the cache") {
  pcm::Corpus corpus = mini_corpus();
  corpus.threads[0].comments[1].toxicity.reset();
  pcm::ScoreCache cache;
  cache.put({pcm::sha256_hex("beta gamma delta"), "stub/id", 0.42, 1});

  struct StubScorer : pcm::Scorer {
    std::string id_ = "stub/id";
    int calls = 0;
    double score_body(const std::string&) override {
      ++calls;
      return 0.11;
    }
    const std::string& id() const override { return id_; }
  } scorer;

  pcm::score_corpus(corpus, cache, scorer);
  CHECK(*corpus.threads[0].comments[1].toxicity == 0.42);  // cache hit
  CHECK(*corpus.threads[0].comments[0].toxicity == 0.2);   // untouched
  CHECK(scorer.calls == 0);
}

TEST_CASE("run_sweep reproduces the reference thread values") {
  pcm::Corpus corpus = mini_corpus();
  pcm::PipelineConfig pipe = pcm::default_pipeline(3);
  pcm::TfProvider provider(pcm::corpus_vocab(corpus, pipe), pipe);
  pcm::ScoreCache cache;
  auto scorer = fixture_scorer(pipe);  // unused: scores are present
  pcm::SweepOptions options;
  options.k = 3;

  pcm::ThresholdGrid grid{0.1, 0.9, 0.4};
  auto rows = pcm::run_sweep(corpus, grid, pipe, provider, cache, *scorer, options);
  REQUIRE(rows.size() == 3);

  CHECK(rows[0].community == "mini");
  CHECK(rows[0].post_id == "p1");
  CHECK(rows[0].threshold == 0.1);
  CHECK(rows[0].removal_rate == 1.0);
  CHECK(rows[0].info_loss == 1.0);
  CHECK(rows[0].jaccard == 0.0);

  CHECK(rows[1].threshold == 0.5);
  CHECK(rows[1].removal_rate == 1.0 / 3.0);
  CHECK(rows[1].info_loss == 0.12212377485965231);
  CHECK(rows[1].jaccard == 0.5);

  CHECK(rows[2].threshold == 0.9);
  CHECK(rows[2].removal_rate == 0.0);
  CHECK(rows[2].info_loss == 0.0);
  CHECK(rows[2].jaccard == 1.0);
}

TEST_CASE("run_sweep on the fixture corpus matches frozen values") {
  pcm::Corpus corpus = fixture_corpus();
  REQUIRE(corpus.threads.size() == 5);
  pcm::PipelineConfig pipe = pcm::default_pipeline(10);
  pcm::TfProvider provider(pcm::corpus_vocab(corpus, pipe), pipe);
  pcm::ScoreCache cache;
  auto scorer = fixture_scorer(pipe);
  pcm::SweepOptions options;
  options.k = 10;

  pcm::ThresholdGrid grid;  // default 99 points
  auto rows = pcm::run_sweep(corpus, grid, pipe, provider, cache, *scorer, options);
  CHECK(rows.size() == corpus.threads.size() * 99);

  const pcm::SweepRow* row = find_row(rows, "p01", 0.5);
  REQUIRE(row != nullptr);
  CHECK(row->removal_rate == 0.2);
  CHECK(row->info_loss == 0.11658812048717382);
  CHECK(row->jaccard == 0.5384615384615384);

  // rows are sorted by (community, post_id, threshold)
  for (size_t i = 1; i < rows.size(); ++i) {
    bool ordered = rows[i - 1].post_id < rows[i].post_id ||
                   (rows[i - 1].post_id == rows[i].post_id &&
                    rows[i - 1].threshold < rows[i].threshold);
    CHECK(ordered);
  }
}

TEST_CASE("generic provider path agrees with the counts fast path bitwise") {
  pcm::PipelineConfig pipe = pcm::default_pipeline(10);
  pcm::SweepOptions options;
  options.k = 10;
  pcm::ThresholdGrid grid{0.05, 0.95, 0.09};

  pcm::Corpus fast_corpus = fixture_corpus();
  pcm::TfProvider fast(pcm::corpus_vocab(fast_corpus, pipe), pipe);
  pcm::ScoreCache cache1;
  auto scorer1 = fixture_scorer(pipe);
  auto fast_rows = pcm::run_sweep(fast_corpus, grid, pipe, fast, cache1, *scorer1, options);

  pcm::Corpus slow_corpus = fixture_corpus();
  pcm::TfProvider inner(pcm::corpus_vocab(slow_corpus, pipe), pipe);
  OpaqueProvider slow(inner);
  pcm::ScoreCache cache2;
  auto scorer2 = fixture_scorer(pipe);
  auto slow_rows = pcm::run_sweep(slow_corpus, grid, pipe, slow, cache2, *scorer2, options);

  CHECK(fast_rows == slow_rows);
}

TEST_CASE("worker counts do not change results") {
  pcm::PipelineConfig pipe = pcm::default_pipeline(10);
  pcm::ThresholdGrid grid{0.1, 0.9, 0.1};

  std::vector<std::vector<pcm::SweepRow>> all;
  for (int workers : {1, 3, 16}) {
    pcm::Corpus corpus = fixture_corpus();
    pcm::TfProvider provider(pcm::corpus_vocab(corpus, pipe), pipe);
    pcm::ScoreCache cache;
    auto scorer = fixture_scorer(pipe);
    pcm::SweepOptions options;
    options.k = 10;
    options.workers = workers;
    all.push_back(pcm::run_sweep(corpus, grid, pipe, provider, cache, *scorer, options));
  }
  CHECK(all[0] == all[1]);
  CHECK(all[0] == all[2]);
}

TEST_CASE("run_sweep validation") {
  pcm::Corpus corpus = mini_corpus();
  pcm::PipelineConfig pipe = pcm::default_pipeline();
  pcm::TfProvider provider(pcm::corpus_vocab(corpus, pipe), pipe);
  pcm::ScoreCache cache;
  auto scorer = fixture_scorer(pipe);

  pcm::SweepOptions bad_k;
  bad_k.k = 0;
  CHECK_THROWS_AS(
      pcm::run_sweep(corpus, pcm::ThresholdGrid{}, pipe, provider, cache, *scorer, bad_k),
      pcm::error);

  pcm::Corpus empty;
  pcm::SweepOptions options;
  try {
    pcm::run_sweep(empty, pcm::ThresholdGrid{}, pipe, provider, cache, *scorer, options);
    FAIL("expected empty_corpus");
  } catch (const pcm::error& e) {
    CHECK(e.code() == pcm::errc::empty_corpus);
  }
}

TEST_CASE("per-community scope pools the top-k sets") {
  pcm::Corpus corpus = fixture_corpus();
  pcm::PipelineConfig pipe = pcm::default_pipeline(10);
  pcm::TfProvider provider(pcm::corpus_vocab(corpus, pipe), pipe);
  pcm::ScoreCache cache;
  auto scorer = fixture_scorer(pipe);
  pcm::SweepOptions options;
  options.k = 10;
  options.scope = pcm::MetricScope::per_community;

  pcm::ThresholdGrid grid{0.1, 0.9, 0.2};
  auto rows = pcm::run_sweep(corpus, grid, pipe, provider, cache, *scorer, options);

  // pooled jaccard is a property of the threshold, not the post
  for (double t : grid.points()) {
    double first = -1.0;
    for (const auto& r : rows) {
      if (r.threshold != t) continue;
      if (first < 0) {
        first = r.jaccard;
      } else {
        CHECK(r.jaccard == first);
      }
    }
  }

  // per-post metrics still vary in the same run
  const pcm::SweepRow* a = find_row(rows, "p01", 0.5);
  const pcm::SweepRow* b = find_row(rows, "p02", 0.5);
  REQUIRE(a != nullptr);
  REQUIRE(b != nullptr);
  CHECK(a->removal_rate != b->removal_rate);
}

TEST_CASE("removed variant flips the comparison set") {
  pcm::Corpus corpus = mini_corpus();
  pcm::PipelineConfig pipe = pcm::default_pipeline(3);
  pcm::TfProvider provider(pcm::corpus_vocab(corpus, pipe), pipe);
  pcm::ScoreCache cache;
  auto scorer = fixture_scorer(pipe);
  pcm::SweepOptions options;
  options.k = 3;
  options.variant = pcm::JaccardVariant::removed;

  pcm::ThresholdGrid grid{0.1, 0.9, 0.4};
  auto rows = pcm::run_sweep(corpus, grid, pipe, provider, cache, *scorer, options);
  REQUIRE(rows.size() == 3);
  // everything removed: the removed text is the original text
  CHECK(rows[0].jaccard == 1.0);
  // nothing removed: the removed set is empty
  CHECK(rows[2].jaccard == 0.0);
}

TEST_CASE("aggregate groups by threshold") {
  std::vector<pcm::SweepRow> rows(4);
  rows[0] = {"c", "p1", 0.5, 0.25, 0.2, 0.6};
  rows[1] = {"c", "p2", 0.5, 0.75, 0.4, 0.8};
  rows[2] = {"c", "p1", 0.7, 0.0, 0.1, 1.0};
  rows[3] = {"c", "p2", 0.7, 0.5, 0.1, 1.0};

  auto curves = pcm::aggregate(rows);
  REQUIRE(curves.size() == 3);
  CHECK(curves[0].metric == "info_loss");
  CHECK(curves[1].metric == "jaccard");
  CHECK(curves[2].metric == "removal_rate");

  const pcm::AggregateCurve& loss = curves[0];
  REQUIRE(loss.points.size() == 2);
  CHECK(loss.points[0].threshold == 0.5);
  CHECK(loss.points[0].n_posts == 2);
  CHECK(loss.points[0].mean == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(loss.points[0].sd == doctest::Approx(std::sqrt(0.02)).epsilon(1e-12));
  CHECK(loss.points[1].threshold == 0.7);
  CHECK(loss.points[1].sd == 0.0);  // identical values

  const pcm::AggregateCurve& rate = curves[2];
  CHECK(rate.points[0].mean == 0.5);
  CHECK(rate.points[1].mean == 0.25);

  // singleton buckets get sd 0
  std::vector<pcm::SweepRow> one = {{"c", "p1", 0.5, 0.1, 0.2, 0.3}};
  auto single = pcm::aggregate(one);
  CHECK(single[0].points[0].sd == 0.0);
  CHECK(single[0].points[0].n_posts == 1);

  try {
    pcm::aggregate({});
    FAIL("expected empty_rows");
  } catch (const pcm::error& e) {
    CHECK(e.code() == pcm::errc::empty_rows);
  }
}

TEST_CASE("aggregate means stay within the value range") {
  pcm::Corpus corpus = fixture_corpus();
  pcm::PipelineConfig pipe = pcm::default_pipeline(10);
  pcm::TfProvider provider(pcm::corpus_vocab(corpus, pipe), pipe);
  pcm::ScoreCache cache;
  auto scorer = fixture_scorer(pipe);
  pcm::SweepOptions options;
  options.k = 10;
  auto rows = pcm::run_sweep(corpus, pcm::ThresholdGrid{}, pipe, provider, cache, *scorer,
                             options);
  auto curves = pcm::aggregate(rows);
  for (const auto& curve : curves) {
    for (const auto& pt : curve.points) {
      CHECK(pt.mean >= 0.0);
      CHECK(pt.mean <= 1.0);
      CHECK(pt.sd >= 0.0);
      CHECK(pt.n_posts == 5);
    }
  }
}

TEST_CASE("loss_jaccard_pairs preserves row order") {
  std::vector<pcm::SweepRow> rows(2);
  rows[0] = {"c", "p1", 0.5, 0.25, 0.2, 0.6};
  rows[1] = {"c", "p2", 0.5, 0.75, 0.4, 0.8};
  auto pairs = pcm::loss_jaccard_pairs(rows);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].first == 0.2);
  CHECK(pairs[0].second == 0.6);
  CHECK(pairs[1].first == 0.4);
  CHECK(pairs[1].second == 0.8);
}

TEST_CASE("make_profiles from explicit lists") {
  pcm::ProfileSpec spec;
  spec.kind = pcm::ProfileSpec::Kind::list;
  spec.thresholds = {0.1, 0.3, 0.5};
  auto profiles = pcm::make_profiles(spec, 0);
  REQUIRE(profiles.size() == 3);
  CHECK(profiles[0].user_id == "u0000");
  CHECK(profiles[0].threshold == 0.1);
  CHECK(profiles[1].user_id == "u0001");
  CHECK(profiles[2].user_id == "u0002");
  CHECK(profiles[2].threshold == 0.5);

  pcm::ProfileSpec empty;
  empty.kind = pcm::ProfileSpec::Kind::list;
  try {
    pcm::make_profiles(empty, 0);
    FAIL("expected empty_profiles");
  } catch (const pcm::error& e) {
    CHECK(e.code() == pcm::errc::empty_profiles);
  }

  pcm::ProfileSpec bad;
  bad.kind = pcm::ProfileSpec::Kind::list;
  bad.thresholds = {1.5};
  CHECK_THROWS_AS(pcm::make_profiles(bad, 0), pcm::error);
}

TEST_CASE("make_profiles beta sampling is seed-deterministic") {
  pcm::ProfileSpec spec;
  spec.kind = pcm::ProfileSpec::Kind::beta;
  spec.alpha = 2.0;
  spec.beta = 5.0;
  spec.count = 5;

  auto profiles = pcm::make_profiles(spec, 7);
  REQUIRE(profiles.size() == 5);
  const double expect[] = {0.40160316619291764, 0.2908703166001822, 0.07422377943462943,
                           0.36236237440944996, 0.3563568656957744};
  for (int i = 0; i < 5; ++i) {
    CHECK(profiles[i].user_id == std::string("u000") + std::to_string(i));
    CHECK(profiles[i].threshold == expect[i]);
  }

  // same seed, same draw; different seed, different draw
  auto again = pcm::make_profiles(spec, 7);
  for (int i = 0; i < 5; ++i) CHECK(again[i].threshold == profiles[i].threshold);
  auto other = pcm::make_profiles(spec, 8);
  CHECK(other[0].threshold != profiles[0].threshold);

  pcm::ProfileSpec bad = spec;
  bad.count = 0;
  CHECK_THROWS_AS(pcm::make_profiles(bad, 7), pcm::error);
  bad = spec;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(pcm::make_profiles(bad, 7), pcm::error);
}

TEST_CASE("beta_sample stays in range with plausible mean") {
  std::mt19937_64 rng(123);
  double sum = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    double x = pcm::beta_sample(rng, 2.0, 5.0);
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    sum += x;
  }
  // mean of Beta(2,5) is 2/7
  CHECK(sum / n == doctest::Approx(2.0 / 7.0).epsilon(0.05));
}

TEST_CASE("ail_report matches the frozen dispersion values") {
  pcm::Corpus corpus = fixture_corpus();
  pcm::PipelineConfig pipe = pcm::default_pipeline(10);
  pcm::TfProvider provider(pcm::corpus_vocab(corpus, pipe), pipe);
  pcm::ScoreCache cache;
  auto scorer = fixture_scorer(pipe);

  pcm::ProfileSpec spec;
  spec.kind = pcm::ProfileSpec::Kind::beta;
  spec.alpha = 2.0;
  spec.beta = 5.0;
  spec.count = 5;
  auto profiles = pcm::make_profiles(spec, 7);

  pcm::AILReport report = pcm::ail_report(corpus, profiles, provider, cache, *scorer);
  REQUIRE(report.per_post.size() == 5);

  const char* ids[] = {"p01", "p02", "p03", "p04", "p05"};
  const double stds[] = {0.12815255610952073, 0.14358574344085942, 0.09338720987687273,
                         0.17201598848228553, 0.14173162349857002};
  const double ranges[] = {0.2956747626893479, 0.33049102981357714, 0.23783236596975776,
                           0.3949443436168353, 0.3169215447042091};
  for (int i = 0; i < 5; ++i) {
    CHECK(report.per_post[i].first == ids[i]);
    CHECK(report.per_post[i].second.std_dev == stds[i]);
    CHECK(report.per_post[i].second.range == ranges[i]);
    CHECK(report.per_post[i].second.losses.size() == 5);
  }
  CHECK(report.corpus_mean_std == 0.13577462428162168);
}

TEST_CASE("uniform profiles have zero dispersion") {
  pcm::Corpus corpus = fixture_corpus();
  pcm::PipelineConfig pipe = pcm::default_pipeline(10);
  pcm::TfProvider provider(pcm::corpus_vocab(corpus, pipe), pipe);
  pcm::ScoreCache cache;
  auto scorer = fixture_scorer(pipe);

  std::vector<pcm::UserProfile> uniform = {{"u0000", 0.4}, {"u0001", 0.4}, {"u0002", 0.4}};
  pcm::AILReport report = pcm::ail_report(corpus, uniform, provider, cache, *scorer);
  for (const auto& [post_id, stat] : report.per_post) {
    CHECK(stat.std_dev == 0.0);
    CHECK(stat.range == 0.0);
  }
  CHECK(report.corpus_mean_std == 0.0);
}
