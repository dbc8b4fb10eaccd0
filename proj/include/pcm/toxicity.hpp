#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "pcm/corpus.hpp"
#include "pcm/textpipe.hpp"

namespace pcm {

struct ScorerSpec {
  enum class Kind { lexicon, remote, cache_only };
  Kind kind = Kind::lexicon;
  std::string lexicon_path;   // lexicon kind
  std::string endpoint;       // remote kind, e.g. "http://host:port/v1/comments:analyze"
  std::string api_key;        // optional; sent as a query parameter
  std::string model_version;  // folded into the remote scorer id
  std::string scorer_id;      // required input for cache_only kind
  // retry/throttle policy for the remote kind
  int max_attempts = 5;
  double backoff_base_ms = 1000.0;  // delay 2^k * base, +-20% jitter
  double rate_per_sec = 0.0;        // 0 = unthrottled
  int max_in_flight = 4;
};

struct ScoreCacheEntry {
  std::string text_hash;  // SHA-256 of the raw comment body
  std::string scorer_id;
  double score = 0.0;
  long long scored_at = 0;
};

// Append-only newline-delimited JSON score store keyed by
// (text_hash, scorer_id). Opening compacts the file: duplicate keys keep the
// last entry, and a trailing partial line (interrupted append) is dropped.
// Safe for concurrent readers with serialized writes.
class ScoreCache {
 public:
  ScoreCache();                                // in-memory only
  explicit ScoreCache(const std::string& path);  // persistent

  std::optional<double> lookup(const std::string& text_hash,
                               const std::string& scorer_id) const;
  void put(const ScoreCacheEntry& entry);
  size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::string path_;
  std::map<std::pair<std::string, std::string>, ScoreCacheEntry> entries_;
};

struct Lexicon {
  std::unordered_set<std::string> words;
  std::string content_sha256;
};

// one lowercase word per line; '#' starts a comment line
Lexicon load_lexicon(const std::string& path);

// fraction of tokens found in the lexicon; empty token list scores 0.0
double score_lexicon(const std::vector<std::string>& tokens,
                     const std::unordered_set<std::string>& lexicon);

// one scoring round trip against a hosted toxicity endpoint, with bounded
// retries on rate-limit (429) and transient failures
double score_remote(const std::string& body, const ScorerSpec& spec);

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual double score_body(const std::string& body) = 0;
  virtual const std::string& id() const = 0;
};

class LexiconScorer : public Scorer {
 public:
  LexiconScorer(const std::string& lexicon_path, const PipelineConfig& pipeline);
  double score_body(const std::string& body) override;
  const std::string& id() const override { return id_; }

 private:
  PipelineConfig pipeline_;
  Lexicon lexicon_;
  std::string id_;
};

class RemoteScorer : public Scorer {
 public:
  explicit RemoteScorer(const ScorerSpec& spec);
  ~RemoteScorer() override;
  double score_body(const std::string& body) override;
  const std::string& id() const override { return id_; }

 private:
  void throttle();

  ScorerSpec spec_;
  std::string id_;
  std::mutex rate_mutex_;
  double next_slot_ms_ = 0.0;  // token-bucket: next allowed send time
  std::unique_ptr<class InFlightGate> gate_;
};

// resolves only against the cache; any miss is an error
class CacheOnlyScorer : public Scorer {
 public:
  explicit CacheOnlyScorer(std::string scorer_id) : id_(std::move(scorer_id)) {}
  double score_body(const std::string& body) override;
  const std::string& id() const override { return id_; }

 private:
  std::string id_;
};

std::unique_ptr<Scorer> make_scorer(const ScorerSpec& spec, const PipelineConfig& pipeline);

// cache read-through; pre_deleted comments get 0.0 without scoring
double get_or_score(const Comment& comment, ScoreCache& cache, Scorer& scorer);

struct ToxicitySummary {
  double mean = 0.0;
  double sd = 0.0;
  long long n = 0;
};

// arithmetic mean and sample (n-1) standard deviation; sd = 0 when n = 1
ToxicitySummary toxicity_summary(const std::vector<double>& scores);

}  // namespace pcm
