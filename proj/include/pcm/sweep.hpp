#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pcm/corpus.hpp"
#include "pcm/metrics.hpp"
#include "pcm/textpipe.hpp"
#include "pcm/toxicity.hpp"

namespace pcm {

struct ThresholdGrid {
  double start = 0.01;
  double end = 0.99;
  double step = 0.01;

  // start + i*step rounded to 1e-9, while <= end; strictly increasing
  std::vector<double> points() const;
};

struct SweepRow {
  std::string community;
  std::string post_id;
  double threshold = 0.0;
  double removal_rate = 0.0;
  double info_loss = 0.0;
  double jaccard = 0.0;

  bool operator==(const SweepRow&) const = default;
};

struct AggregatePoint {
  double threshold = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  long long n_posts = 0;
};

struct AggregateCurve {
  std::string metric;  // "info_loss" | "jaccard" | "removal_rate"
  std::vector<AggregatePoint> points;  // threshold ascending
};

enum class MetricScope { per_post, per_community };
enum class JaccardVariant { remaining, removed };

struct SweepOptions {
  int k = 100;
  MetricScope scope = MetricScope::per_post;
  JaccardVariant variant = JaccardVariant::remaining;
  int workers = 0;  // 0 = one per hardware thread
};

// non-pre-deleted comment bodies joined by single newlines, in thread order
std::string thread_document(const Thread& thread);

// sorted distinct normalized tokens over every thread document
std::vector<std::string> corpus_vocab(const Corpus& corpus, const PipelineConfig& pipeline);

// score every unscored comment through the cache, in corpus order
void score_corpus(Corpus& corpus, ScoreCache& cache, Scorer& scorer);

// the full experiment: score, then for every (post, grid point) compute
// removal rate, information loss against the post's own unmoderated
// document, and top-k Jaccard at the configured scope/variant. Rows come
// back in (community, post_id, threshold) order and are identical for any
// worker count. Nothing is returned on failure.
std::vector<SweepRow> run_sweep(Corpus& corpus, const ThresholdGrid& grid,
                                const PipelineConfig& pipeline, EmbeddingProvider& provider,
                                ScoreCache& cache, Scorer& scorer,
                                const SweepOptions& options);

// per-threshold mean and sample sd of each metric across posts
std::vector<AggregateCurve> aggregate(const std::vector<SweepRow>& rows);

// (info_loss, jaccard) per row, in row order
std::vector<std::pair<double, double>> loss_jaccard_pairs(const std::vector<SweepRow>& rows);

struct ProfileSpec {
  enum class Kind { list, beta };
  Kind kind = Kind::list;
  std::vector<double> thresholds;  // list kind
  double alpha = 2.0;              // beta kind
  double beta = 5.0;
  long long count = 0;
};

// one draw from Beta(alpha, beta) via Johnk's rejection method, consuming
// two uniforms per attempt
double beta_sample(std::mt19937_64& rng, double alpha, double beta);

// profiles u0000, u0001, ... from an explicit threshold list or a seeded
// Beta sample
std::vector<UserProfile> make_profiles(const ProfileSpec& spec, unsigned long long seed);

struct AILReport {
  std::vector<std::pair<std::string, AILStat>> per_post;  // post id ascending
  double corpus_mean_std = 0.0;  // mean of per-post std values
};

AILReport ail_report(Corpus& corpus, const std::vector<UserProfile>& profiles,
                     EmbeddingProvider& provider, ScoreCache& cache, Scorer& scorer);

}  // namespace pcm
