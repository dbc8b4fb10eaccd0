#include "pcm/sweep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>

#include "pcm/errors.hpp"
#include "pcm/moderation.hpp"
#include "pcm/parallel.hpp"
#include "pcm/stats.hpp"

namespace pcm {

namespace {

// indices of the k most frequent vocabulary entries, count descending and
// index (= token) ascending on ties; returned sorted ascending for set math
std::vector<uint32_t> topk_indices(const std::vector<double>& counts, int k) {
  std::vector<uint32_t> nz;
  for (uint32_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0.0) nz.push_back(i);
  }
  if (k <= 0) return {};
  if (nz.size() > static_cast<size_t>(k)) {
    std::sort(nz.begin(), nz.end(), [&](uint32_t l, uint32_t r) {
      if (counts[l] != counts[r]) return counts[l] > counts[r];
      return l < r;
    });
    nz.resize(static_cast<size_t>(k));
    std::sort(nz.begin(), nz.end());
  }
  return nz;
}

double jaccard_sorted(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  if (a.empty() && b.empty()) return 1.0;
  size_t i = 0, j = 0;
  long long inter = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++inter;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  long long uni = static_cast<long long>(a.size()) + static_cast<long long>(b.size()) - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

struct CommentCounts {
  double score = 0.0;
  const std::string* body = nullptr;
  std::vector<std::pair<uint32_t, double>> sparse;  // index ascending
};

// everything about one thread the per-threshold loop needs
struct ThreadData {
  const Thread* thread = nullptr;
  std::vector<double> all_scores;        // every comment, traversal order
  std::vector<CommentCounts> content;    // non-pre-deleted comments only
  std::string orig_doc;
  std::vector<double> orig_counts;       // over the shared vocabulary
  EmbeddingVector orig_vec;
  std::vector<uint32_t> orig_topk;
};

std::vector<std::pair<uint32_t, double>> to_sparse(const std::vector<double>& dense) {
  std::vector<std::pair<uint32_t, double>> out;
  for (uint32_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) out.emplace_back(i, dense[i]);
  }
  return out;
}

void fill_survivor_counts(const ThreadData& td, double threshold,
                          std::vector<double>& dense) {
  std::fill(dense.begin(), dense.end(), 0.0);
  for (const CommentCounts& cc : td.content) {
    if (cc.score > threshold) continue;  // removed from this user's view
    for (const auto& [idx, n] : cc.sparse) dense[idx] += n;
  }
}

std::string survivor_document(const ThreadData& td, double threshold) {
  std::string doc;
  bool first = true;
  for (const CommentCounts& cc : td.content) {
    if (cc.score > threshold) continue;
    if (!first) doc.push_back('\n');
    doc += *cc.body;
    first = false;
  }
  return doc;
}

}  // namespace

std::vector<double> ThresholdGrid::points() const {
  if (!(start >= 0.0) || !(end <= 1.0) || !(start <= end) || !(step > 0.0)) {
    throw error(errc::config_error, "grid must satisfy 0 <= start <= end <= 1 and step > 0");
  }
  std::vector<double> pts;
  for (long long i = 0;; ++i) {
    double p = std::floor((start + static_cast<double>(i) * step) * 1e9 + 0.5) / 1e9;
    if (p > end) break;
    if (!pts.empty() && p <= pts.back()) {
      throw error(errc::config_error, "grid step is below the 1e-9 resolution");
    }
    pts.push_back(p);
  }
  return pts;
}

std::string thread_document(const Thread& thread) {
  std::string doc;
  bool first = true;
  for (const Comment& c : thread.comments) {
    if (c.pre_deleted) continue;
    if (!first) doc.push_back('\n');
    doc += c.body;
    first = false;
  }
  return doc;
}

std::vector<std::string> corpus_vocab(const Corpus& corpus, const PipelineConfig& pipeline) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.threads.size());
  for (const Thread& t : corpus.threads) docs.push_back(normalize(thread_document(t), pipeline));
  return build_vocab(docs);
}

void score_corpus(Corpus& corpus, ScoreCache& cache, Scorer& scorer) {
  for (Thread& t : corpus.threads) {
    for (Comment& c : t.comments) {
      if (!c.toxicity.has_value()) c.toxicity = get_or_score(c, cache, scorer);
    }
  }
}

std::vector<SweepRow> run_sweep(Corpus& corpus, const ThresholdGrid& grid,
                                const PipelineConfig& pipeline, EmbeddingProvider& provider,
                                ScoreCache& cache, Scorer& scorer,
                                const SweepOptions& options) {
  const std::vector<double> thresholds = grid.points();
  if (corpus.threads.empty()) throw error(errc::empty_corpus, "no threads to sweep");
  if (options.k <= 0) throw error(errc::config_error, "k must be positive");

  score_corpus(corpus, cache, scorer);

  // shared index space for counts: the corpus vocabulary
  const std::vector<std::string> vocab = corpus_vocab(corpus, pipeline);
  std::unordered_map<std::string, uint32_t> vindex;
  vindex.reserve(vocab.size());
  for (uint32_t i = 0; i < vocab.size(); ++i) vindex.emplace(vocab[i], i);
  const size_t dim = vocab.size();

  // the term-frequency fast path applies when the provider embeds over this
  // exact vocabulary; counts then feed both the embedding and the top-k sets
  auto* tf = dynamic_cast<TfProvider*>(&provider);
  const bool counts_path = tf != nullptr && tf->vocab() == vocab;

  std::vector<const Thread*> order;
  order.reserve(corpus.threads.size());
  for (const Thread& t : corpus.threads) order.push_back(&t);
  std::sort(order.begin(), order.end(),
            [](const Thread* a, const Thread* b) { return a->post.id < b->post.id; });

  std::vector<ThreadData> data(order.size());
  parallel_for(order.size(), options.workers, [&](size_t ti) {
    ThreadData& td = data[ti];
    td.thread = order[ti];
    td.all_scores.reserve(td.thread->comments.size());
    std::vector<double> dense(dim, 0.0);
    for (const Comment& c : td.thread->comments) {
      if (!c.toxicity.has_value()) {
        throw error(errc::unscored_comment, c.id + " has no toxicity score");
      }
      td.all_scores.push_back(*c.toxicity);
      if (c.pre_deleted) continue;
      CommentCounts cc;
      cc.score = *c.toxicity;
      cc.body = &c.body;
      std::vector<double> one(dim, 0.0);
      for (const std::string& tok : normalize(c.body, pipeline)) {
        auto it = vindex.find(tok);
        if (it != vindex.end()) one[it->second] += 1.0;
      }
      cc.sparse = to_sparse(one);
      for (const auto& [idx, n] : cc.sparse) dense[idx] += n;
      td.content.push_back(std::move(cc));
    }
    td.orig_doc = thread_document(*td.thread);
    if (td.orig_doc.empty()) {
      throw error(errc::empty_original, td.thread->post.id + " has an empty document");
    }
    td.orig_counts = dense;
    td.orig_vec = counts_path ? tf->embed_counts(td.orig_counts)
                              : provider.embed(td.orig_doc);
    td.orig_topk = topk_indices(td.orig_counts, options.k);
  });

  std::vector<SweepRow> rows(order.size() * thresholds.size());
  parallel_for(order.size(), options.workers, [&](size_t ti) {
    const ThreadData& td = data[ti];
    const double total = static_cast<double>(td.thread->comments.size());
    std::vector<double> dense(dim, 0.0);
    std::vector<double> other(dim, 0.0);
    for (size_t gi = 0; gi < thresholds.size(); ++gi) {
      const double thr = thresholds[gi];
      long long removed = 0;
      for (double s : td.all_scores) {
        if (s > thr) ++removed;
      }
      fill_survivor_counts(td, thr, dense);

      EmbeddingVector mod_vec = counts_path
                                    ? tf->embed_counts(dense)
                                    : provider.embed(survivor_document(td, thr));
      double loss = 1.0 - cosine(td.orig_vec, mod_vec);

      double jac;
      if (options.variant == JaccardVariant::remaining) {
        jac = jaccard_sorted(td.orig_topk, topk_indices(dense, options.k));
      } else {
        for (size_t i = 0; i < dim; ++i) other[i] = td.orig_counts[i] - dense[i];
        jac = jaccard_sorted(td.orig_topk, topk_indices(other, options.k));
      }

      SweepRow& row = rows[ti * thresholds.size() + gi];
      row.community = corpus.community;
      row.post_id = td.thread->post.id;
      row.threshold = thr;
      row.removal_rate = total == 0.0 ? 0.0 : static_cast<double>(removed) / total;
      row.info_loss = loss;
      row.jaccard = jac;
    }
  });

  if (options.scope == MetricScope::per_community) {
    // pooled top-k: one community-wide word set per threshold
    std::vector<double> pooled_orig(dim, 0.0);
    for (const ThreadData& td : data) {
      for (size_t i = 0; i < dim; ++i) pooled_orig[i] += td.orig_counts[i];
    }
    const std::vector<uint32_t> pooled_topk = topk_indices(pooled_orig, options.k);
    std::vector<double> pooled(dim, 0.0);
    std::vector<double> dense(dim, 0.0);
    for (size_t gi = 0; gi < thresholds.size(); ++gi) {
      std::fill(pooled.begin(), pooled.end(), 0.0);
      for (const ThreadData& td : data) {
        fill_survivor_counts(td, thresholds[gi], dense);
        for (size_t i = 0; i < dim; ++i) pooled[i] += dense[i];
      }
      if (options.variant == JaccardVariant::removed) {
        for (size_t i = 0; i < dim; ++i) pooled[i] = pooled_orig[i] - pooled[i];
      }
      const double jac = jaccard_sorted(pooled_topk, topk_indices(pooled, options.k));
      for (size_t ti = 0; ti < order.size(); ++ti) {
        rows[ti * thresholds.size() + gi].jaccard = jac;
      }
    }
  }

  return rows;
}

std::vector<AggregateCurve> aggregate(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw error(errc::empty_rows, "no sweep rows");
  std::map<double, std::array<std::vector<double>, 3>> buckets;  // rate, loss, jaccard
  for (const SweepRow& row : rows) {
    auto& b = buckets[row.threshold];
    b[0].push_back(row.removal_rate);
    b[1].push_back(row.info_loss);
    b[2].push_back(row.jaccard);
  }
  const char* names[3] = {"removal_rate", "info_loss", "jaccard"};
  const int order[3] = {1, 2, 0};  // metric name ascending
  std::vector<AggregateCurve> curves;
  for (int oi = 0; oi < 3; ++oi) {
    const int mi = order[oi];
    AggregateCurve curve;
    curve.metric = names[mi];
    for (const auto& [thr, b] : buckets) {
      MeanSd ms = mean_sample_sd(b[mi]);
      curve.points.push_back({thr, ms.mean, ms.sd, static_cast<long long>(b[mi].size())});
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<std::pair<double, double>> loss_jaccard_pairs(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw error(errc::empty_rows, "no sweep rows");
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(rows.size());
  for (const SweepRow& row : rows) pairs.emplace_back(row.info_loss, row.jaccard);
  return pairs;
}

double beta_sample(std::mt19937_64& rng, double alpha, double beta) {
  const double inv_a = 1.0 / alpha;
  const double inv_b = 1.0 / beta;
  const double scale = 1.0 / 9007199254740992.0;  // 2^-53
  for (;;) {
    double u1 = static_cast<double>(rng() >> 11) * scale;
    double u2 = static_cast<double>(rng() >> 11) * scale;
    double x = std::pow(u1, inv_a);
    double y = std::pow(u2, inv_b);
    double s = x + y;
    if (s <= 1.0 && s > 0.0) return x / s;
  }
}

std::vector<UserProfile> make_profiles(const ProfileSpec& spec, unsigned long long seed) {
  std::vector<UserProfile> profiles;
  if (spec.kind == ProfileSpec::Kind::list) {
    if (spec.thresholds.empty()) throw error(errc::empty_profiles, "threshold list is empty");
    for (size_t i = 0; i < spec.thresholds.size(); ++i) {
      double t = spec.thresholds[i];
      if (!(t >= 0.0 && t <= 1.0)) {
        throw error(errc::config_error, "profile threshold outside [0,1]");
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "u%04zu", i);
      profiles.push_back({buf, t});
    }
    return profiles;
  }
  if (spec.count <= 0) throw error(errc::empty_profiles, "profile count must be positive");
  if (!(spec.alpha > 0.0) || !(spec.beta > 0.0)) {
    throw error(errc::config_error, "beta shape parameters must be positive");
  }
  std::mt19937_64 rng(seed);
  for (long long i = 0; i < spec.count; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "u%04lld", i);
    profiles.push_back({buf, beta_sample(rng, spec.alpha, spec.beta)});
  }
  return profiles;
}

AILReport ail_report(Corpus& corpus, const std::vector<UserProfile>& profiles,
                     EmbeddingProvider& provider, ScoreCache& cache, Scorer& scorer) {
  if (profiles.empty()) throw error(errc::empty_profiles, "no user profiles");
  if (corpus.threads.empty()) throw error(errc::empty_corpus, "no threads");
  score_corpus(corpus, cache, scorer);

  std::vector<const Thread*> order;
  order.reserve(corpus.threads.size());
  for (const Thread& t : corpus.threads) order.push_back(&t);
  std::sort(order.begin(), order.end(),
            [](const Thread* a, const Thread* b) { return a->post.id < b->post.id; });

  AILReport report;
  for (const Thread* t : order) {
    report.per_post.emplace_back(t->post.id, ail(user_losses(*t, profiles, provider)));
  }
  double acc = 0.0;
  for (const auto& [post_id, stat] : report.per_post) acc += stat.std_dev;
  report.corpus_mean_std = acc / static_cast<double>(report.per_post.size());
  return report;
}

}  // namespace pcm
