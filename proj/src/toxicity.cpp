#include "pcm/toxicity.hpp"

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "pcm/errors.hpp"
#include "pcm/hash.hpp"

namespace pcm {

namespace {

using json = nlohmann::json;

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

// ------------------------------------------------------------------ cache

ScoreCache::ScoreCache() = default;

ScoreCache::ScoreCache(const std::string& path) : path_(path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    // absent file: first run; created on first put
    return;
  }
  std::ostringstream raw;
  raw << in.rdbuf();
  const std::string bytes = raw.str();
  const bool ends_with_newline = !bytes.empty() && bytes.back() == '\n';

  size_t line_count = 0;
  bool needs_compaction = false;
  size_t start = 0;
  while (start < bytes.size()) {
    size_t nl = bytes.find('\n', start);
    const bool is_final_partial = (nl == std::string::npos);
    std::string line = is_final_partial ? bytes.substr(start)
                                        : bytes.substr(start, nl - start);
    start = is_final_partial ? bytes.size() : nl + 1;
    if (line.empty()) continue;
    ++line_count;
    json rec = json::parse(line, nullptr, false);
    bool ok = !rec.is_discarded() && rec.is_object() && rec.contains("text_hash") &&
              rec["text_hash"].is_string() && rec.contains("scorer_id") &&
              rec["scorer_id"].is_string() && rec.contains("score") &&
              rec["score"].is_number() && rec.contains("scored_at") &&
              rec["scored_at"].is_number_integer();
    if (ok) {
      double score = rec["score"].get<double>();
      if (score < 0.0 || score > 1.0 || !std::isfinite(score)) ok = false;
      if (ok) {
        ScoreCacheEntry entry{rec["text_hash"].get<std::string>(),
                              rec["scorer_id"].get<std::string>(), score,
                              rec["scored_at"].get<long long>()};
        auto key = std::make_pair(entry.text_hash, entry.scorer_id);
        if (entries_.count(key)) needs_compaction = true;  // last write wins
        entries_[key] = std::move(entry);
        continue;
      }
    }
    if (is_final_partial && !ends_with_newline) {
      // interrupted append; drop it
      needs_compaction = true;
      --line_count;
      continue;
    }
    throw error(errc::cache_corrupt, path + ": bad entry: " + line.substr(0, 120));
  }

  if (needs_compaction || entries_.size() != line_count) {
    const std::string tmp = path + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw error(errc::io_failure, "cannot write " + tmp);
      for (const auto& [key, entry] : entries_) {
        json rec{{"text_hash", entry.text_hash},
                 {"scorer_id", entry.scorer_id},
                 {"score", entry.score},
                 {"scored_at", entry.scored_at}};
        out << rec.dump() << '\n';
      }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
      throw error(errc::io_failure, "cannot replace " + path);
    }
  }
}

std::optional<double> ScoreCache::lookup(const std::string& text_hash,
                                         const std::string& scorer_id) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = entries_.find(std::make_pair(text_hash, scorer_id));
  if (it == entries_.end()) return std::nullopt;
  return it->second.score;
}

void ScoreCache::put(const ScoreCacheEntry& entry) {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_[std::make_pair(entry.text_hash, entry.scorer_id)] = entry;
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw error(errc::io_failure, "cannot append to " + path_);
  json rec{{"text_hash", entry.text_hash},
           {"scorer_id", entry.scorer_id},
           {"score", entry.score},
           {"scored_at", entry.scored_at}};
  out << rec.dump() << '\n';
  out.flush();
  if (!out) throw error(errc::io_failure, "write failed: " + path_);
}

size_t ScoreCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

// ---------------------------------------------------------------- lexicon

Lexicon load_lexicon(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io_failure, "cannot open " + path);
  std::ostringstream raw;
  raw << in.rdbuf();
  const std::string bytes = raw.str();

  Lexicon lex;
  lex.content_sha256 = sha256_hex(bytes);
  size_t start = 0;
  while (start <= bytes.size()) {
    size_t nl = bytes.find('\n', start);
    std::string line = (nl == std::string::npos) ? bytes.substr(start)
                                                 : bytes.substr(start, nl - start);
    start = (nl == std::string::npos) ? bytes.size() + 1 : nl + 1;
    // trim ASCII whitespace
    size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    size_t e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    if (line.empty() || line[0] == '#') continue;
    for (char& c : line) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 0x20);
    }
    lex.words.insert(line);
  }
  return lex;
}

double score_lexicon(const std::vector<std::string>& tokens,
                     const std::unordered_set<std::string>& lexicon) {
  if (lexicon.empty()) throw error(errc::empty_lexicon, "lexicon has no words");
  if (tokens.empty()) return 0.0;
  long long matches = 0;
  for (const auto& tok : tokens) {
    if (lexicon.count(tok)) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(tokens.size());
}

LexiconScorer::LexiconScorer(const std::string& lexicon_path, const PipelineConfig& pipeline)
    : pipeline_(pipeline), lexicon_(load_lexicon(lexicon_path)) {
  if (lexicon_.words.empty()) throw error(errc::empty_lexicon, lexicon_path);
  // the id covers both the word list and the normalization the scores
  // depend on, so any change to either invalidates cached scores
  id_ = "lexicon/" + sha16(lexicon_.content_sha256 + "|" + pipeline_.stopword_list_id + "|" +
                           pipeline_.lemma_table_id + "|" + pipeline_.token_rule);
}

double LexiconScorer::score_body(const std::string& body) {
  return score_lexicon(normalize(body, pipeline_), lexicon_.words);
}

// ----------------------------------------------------------------- remote

namespace {

struct ParsedEndpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedEndpoint parse_endpoint(const std::string& endpoint) {
  size_t scheme = endpoint.find("://");
  if (scheme == std::string::npos) {
    throw error(errc::config_error, "endpoint must include a scheme: " + endpoint);
  }
  size_t path_start = endpoint.find('/', scheme + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

double jitter_factor() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  std::uniform_real_distribution<double> dist(0.8, 1.2);
  return dist(rng);
}

std::string request_payload(const std::string& body) {
  json payload;
  payload["comment"]["text"] = body;
  payload["requestedAttributes"]["TOXICITY"] = json::object();
  return payload.dump();
}

double extract_score(const std::string& response_body) {
  json rec = json::parse(response_body, nullptr, false);
  if (rec.is_discarded()) throw error(errc::malformed_response, "response is not JSON");
  const json* node = &rec;
  for (const char* key : {"attributeScores", "TOXICITY", "summaryScore", "value"}) {
    if (!node->is_object() || !node->contains(key)) {
      throw error(errc::malformed_response, std::string("response missing ") + key);
    }
    node = &(*node)[key];
  }
  if (!node->is_number()) throw error(errc::malformed_response, "score value is not a number");
  double value = node->get<double>();
  if (!(value >= 0.0 && value <= 1.0)) {
    throw error(errc::out_of_range,
                "score " + std::to_string(value) + " outside [0,1]");
  }
  return value;
}

}  // namespace

double score_remote(const std::string& body, const ScorerSpec& spec) {
  if (spec.kind != ScorerSpec::Kind::remote) {
    throw error(errc::config_error, "score_remote requires a remote scorer spec");
  }
  if (body.empty()) throw error(errc::config_error, "remote scoring of empty body");
  ParsedEndpoint ep = parse_endpoint(spec.endpoint);
  std::string path = ep.path;
  if (!spec.api_key.empty()) {
    path += (path.find('?') == std::string::npos ? "?" : "&");
    path += "key=" + spec.api_key;
  }
  const std::string payload = request_payload(body);

  std::string last_failure = "no attempt made";
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    if (attempt > 0) {
      double delay_ms = spec.backoff_base_ms * std::pow(2.0, attempt - 1) * jitter_factor();
      std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay_ms));
    }
    httplib::Client client(ep.base);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(30, 0);
    auto res = client.Post(path, payload, "application/json");
    if (!res) {
      last_failure = "connection failed";
      continue;  // transient
    }
    if (res->status == 429 || (res->status >= 500 && res->status < 600)) {
      last_failure = "status " + std::to_string(res->status);
      continue;  // rate limit / transient server error
    }
    if (res->status != 200) {
      throw error(errc::remote_unavailable,
                  "unexpected status " + std::to_string(res->status));
    }
    return extract_score(res->body);
  }
  throw error(errc::remote_unavailable,
              std::to_string(spec.max_attempts) + " attempts exhausted; last: " + last_failure);
}

// counting gate bounding concurrent remote requests
class InFlightGate {
 public:
  explicit InFlightGate(int limit) : limit_(limit < 1 ? 1 : limit) {}

  void acquire() {
    std::unique_lock<std::mutex> lock(mutex_);
    cv_.wait(lock, [&] { return active_ < limit_; });
    ++active_;
  }
  void release() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      --active_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  int limit_;
  int active_ = 0;
};

RemoteScorer::RemoteScorer(const ScorerSpec& spec)
    : spec_(spec), gate_(std::make_unique<InFlightGate>(spec.max_in_flight)) {
  if (spec_.endpoint.empty()) {
    throw error(errc::config_error, "remote scorer requires an endpoint");
  }
  id_ = "remote/" + sha16(spec_.endpoint + "|" + spec_.model_version);
}

RemoteScorer::~RemoteScorer() = default;

void RemoteScorer::throttle() {
  if (spec_.rate_per_sec <= 0.0) return;
  const double interval_ms = 1000.0 / spec_.rate_per_sec;
  double wait_ms = 0.0;
  {
    std::lock_guard<std::mutex> lock(rate_mutex_);
    double now = now_ms();
    if (next_slot_ms_ < now) next_slot_ms_ = now;
    wait_ms = next_slot_ms_ - now;
    next_slot_ms_ += interval_ms;
  }
  if (wait_ms > 0.0) {
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(wait_ms));
  }
}

double RemoteScorer::score_body(const std::string& body) {
  gate_->acquire();
  try {
    throttle();
    double score = score_remote(body, spec_);
    gate_->release();
    return score;
  } catch (...) {
    gate_->release();
    throw;
  }
}

double CacheOnlyScorer::score_body(const std::string& body) {
  throw error(errc::cache_miss,
              "no cached score under scorer_id " + id_ + " for body hash " +
                  sha16(body));
}

std::unique_ptr<Scorer> make_scorer(const ScorerSpec& spec, const PipelineConfig& pipeline) {
  switch (spec.kind) {
    case ScorerSpec::Kind::lexicon:
      return std::make_unique<LexiconScorer>(spec.lexicon_path, pipeline);
    case ScorerSpec::Kind::remote:
      return std::make_unique<RemoteScorer>(spec);
    case ScorerSpec::Kind::cache_only:
      if (spec.scorer_id.empty()) {
        throw error(errc::config_error, "cache-only scorer requires an explicit scorer_id");
      }
      return std::make_unique<CacheOnlyScorer>(spec.scorer_id);
  }
  throw error(errc::config_error, "unknown scorer kind");
}

double get_or_score(const Comment& comment, ScoreCache& cache, Scorer& scorer) {
  if (comment.pre_deleted) return 0.0;
  const std::string text_hash = sha256_hex(comment.body);
  if (auto hit = cache.lookup(text_hash, scorer.id())) return *hit;
  double score = scorer.score_body(comment.body);
  if (!(score >= 0.0 && score <= 1.0)) {
    throw error(errc::out_of_range, "scorer produced " + std::to_string(score));
  }
  cache.put({text_hash, scorer.id(), score,
             static_cast<long long>(std::time(nullptr))});
  return score;
}

// ---------------------------------------------------------------- summary

ToxicitySummary toxicity_summary(const std::vector<double>& scores) {
  if (scores.empty()) throw error(errc::empty_input, "no scores to summarize");
  ToxicitySummary summary;
  summary.n = static_cast<long long>(scores.size());
  double m = 0.0;
  for (double s : scores) m += s;
  m /= static_cast<double>(scores.size());
  summary.mean = m;
  if (scores.size() == 1) {
    summary.sd = 0.0;
    return summary;
  }
  double acc = 0.0;
  for (double s : scores) {
    double d = s - m;
    acc += d * d;
  }
  summary.sd = std::sqrt(acc / static_cast<double>(scores.size() - 1));
  return summary;
}

}  // namespace pcm
