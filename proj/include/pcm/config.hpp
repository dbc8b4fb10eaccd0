#pragma once

#include <string>

#include "pcm/sweep.hpp"
#include "pcm/toxicity.hpp"

namespace pcm {

struct ProviderSpec {
  enum class Kind { term_frequency, file, remote };
  Kind kind = Kind::term_frequency;
  std::string path;      // file kind: JSONL of precomputed vectors
  std::string endpoint;  // remote kind
};

// one validated JSON document describing a full run; unknown keys are
// rejected at every level so silent typos cannot change an experiment
struct RunConfig {
  std::string community;
  std::string posts_path;
  std::string comments_path;
  long long window_from = 0;  // inclusive epoch seconds
  long long window_to = 0;    // exclusive
  long long top_posts = 50;
  int k = 100;
  unsigned long long seed = 0;
  ThresholdGrid grid;
  MetricScope scope = MetricScope::per_post;
  JaccardVariant variant = JaccardVariant::remaining;
  int workers = 0;
  ScorerSpec scorer;
  ProviderSpec provider;
  ProfileSpec profiles;
  std::string out_dir;         // optional; the CLI flag overrides
  std::string cache_path;      // optional; defaults next to the outputs
  std::string stopwords_path;  // optional pipeline list overrides
  std::string lemmas_path;
  std::string config_sha256;   // of the raw config bytes
  std::string config_dir;      // relative paths resolve against this
};

// "YYYY-MM-DD" (midnight UTC) -> epoch seconds
long long parse_utc_date(const std::string& text);

RunConfig load_run_config(const std::string& path);

const char* scope_name(MetricScope scope);
const char* variant_name(JaccardVariant variant);

}  // namespace pcm
