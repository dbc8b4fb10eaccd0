#include "pcm/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pcm/errors.hpp"
#include "pcm/hash.hpp"

namespace pcm {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& message) {
  throw error(errc::config_error, message);
}

void reject_unknown(const json& obj, const char* where,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) bad(std::string(where) + ": unknown key \"" + it.key() + "\"");
  }
}

std::string need_string(const json& obj, const char* where, const char* key) {
  if (!obj.contains(key)) bad(std::string(where) + ": missing \"" + key + "\"");
  if (!obj[key].is_string()) bad(std::string(where) + ": \"" + key + "\" must be a string");
  return obj[key].get<std::string>();
}

long long need_int(const json& obj, const char* where, const char* key) {
  if (!obj.contains(key)) bad(std::string(where) + ": missing \"" + key + "\"");
  if (!obj[key].is_number_integer()) {
    bad(std::string(where) + ": \"" + key + "\" must be an integer");
  }
  return obj[key].get<long long>();
}

double opt_number(const json& obj, const char* where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) bad(std::string(where) + ": \"" + key + "\" must be a number");
  return obj[key].get<double>();
}

long long opt_int(const json& obj, const char* where, const char* key, long long fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) {
    bad(std::string(where) + ": \"" + key + "\" must be an integer");
  }
  return obj[key].get<long long>();
}

std::string opt_string(const json& obj, const char* where, const char* key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) bad(std::string(where) + ": \"" + key + "\" must be a string");
  return obj[key].get<std::string>();
}

// days since 1970-01-01 for a proleptic-Gregorian civil date
long long days_from_civil(long long y, int m, int d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const long long yoe = y - era * 400;
  const long long doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const long long doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

bool leap_year(long long y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(long long y, int m) {
  static const int base[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && leap_year(y)) return 29;
  return base[m - 1];
}

long long window_bound(const json& obj, const char* key) {
  const json& v = obj[key];
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_string()) return parse_utc_date(v.get<std::string>());
  bad(std::string("window: \"") + key + "\" must be \"YYYY-MM-DD\" or epoch seconds");
}

std::string resolve_path(const std::string& dir, const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  return dir + "/" + path;
}

}  // namespace

long long parse_utc_date(const std::string& text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    bad("date must be YYYY-MM-DD: \"" + text + "\"");
  }
  for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (text[i] < '0' || text[i] > '9') bad("date must be YYYY-MM-DD: \"" + text + "\"");
  }
  long long y = std::stoll(text.substr(0, 4));
  int m = std::stoi(text.substr(5, 2));
  int d = std::stoi(text.substr(8, 2));
  if (m < 1 || m > 12) bad("month out of range in \"" + text + "\"");
  if (d < 1 || d > days_in_month(y, m)) bad("day out of range in \"" + text + "\"");
  return days_from_civil(y, m, d) * 86400;
}

const char* scope_name(MetricScope scope) {
  return scope == MetricScope::per_post ? "per-post" : "per-community";
}

const char* variant_name(JaccardVariant variant) {
  return variant == JaccardVariant::remaining ? "remaining" : "removed";
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::config_error, "cannot open config " + path);
  std::ostringstream raw;
  raw << in.rdbuf();
  const std::string bytes = raw.str();

  json root = json::parse(bytes, nullptr, false);
  if (root.is_discarded() || !root.is_object()) {
    bad(path + " is not a JSON object");
  }

  RunConfig cfg;
  cfg.config_sha256 = sha256_hex(bytes);
  size_t slash = path.find_last_of('/');
  cfg.config_dir = (slash == std::string::npos) ? "." : path.substr(0, slash);

  reject_unknown(root, "config",
                 {"schema_version", "community", "inputs", "window", "top_posts", "k", "seed",
                  "grid", "scope", "jaccard_variant", "workers", "scorer", "provider",
                  "profiles", "out_dir", "cache_path", "stopwords_path", "lemmas_path"});

  if (need_int(root, "config", "schema_version") != 1) {
    bad("unsupported schema_version (expected 1)");
  }

  cfg.community = need_string(root, "config", "community");
  if (cfg.community.empty()) bad("community must be nonempty");
  for (char c : cfg.community) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '-' || c == '.';
    if (!ok) bad("community may use only letters, digits, '_', '-', '.'");
  }

  if (!root.contains("inputs") || !root["inputs"].is_object()) bad("missing \"inputs\" object");
  const json& inputs = root["inputs"];
  reject_unknown(inputs, "inputs", {"posts", "comments"});
  cfg.posts_path = resolve_path(cfg.config_dir, need_string(inputs, "inputs", "posts"));
  cfg.comments_path = resolve_path(cfg.config_dir, need_string(inputs, "inputs", "comments"));

  if (!root.contains("window") || !root["window"].is_object()) bad("missing \"window\" object");
  const json& window = root["window"];
  reject_unknown(window, "window", {"from", "to"});
  if (!window.contains("from") || !window.contains("to")) {
    bad("window needs \"from\" and \"to\"");
  }
  cfg.window_from = window_bound(window, "from");
  cfg.window_to = window_bound(window, "to");
  if (cfg.window_from >= cfg.window_to) bad("window \"from\" must precede \"to\"");

  cfg.top_posts = opt_int(root, "config", "top_posts", 50);
  if (cfg.top_posts < 1) bad("top_posts must be at least 1");
  cfg.k = static_cast<int>(opt_int(root, "config", "k", 100));
  if (cfg.k < 1) bad("k must be at least 1");
  long long seed = opt_int(root, "config", "seed", 0);
  if (seed < 0) bad("seed must be non-negative");
  cfg.seed = static_cast<unsigned long long>(seed);
  cfg.workers = static_cast<int>(opt_int(root, "config", "workers", 0));
  if (cfg.workers < 0) bad("workers must be non-negative");

  if (root.contains("grid")) {
    if (!root["grid"].is_object()) bad("\"grid\" must be an object");
    const json& grid = root["grid"];
    reject_unknown(grid, "grid", {"start", "end", "step"});
    cfg.grid.start = opt_number(grid, "grid", "start", cfg.grid.start);
    cfg.grid.end = opt_number(grid, "grid", "end", cfg.grid.end);
    cfg.grid.step = opt_number(grid, "grid", "step", cfg.grid.step);
  }
  cfg.grid.points();  // validates the bounds now rather than mid-run

  std::string scope = opt_string(root, "config", "scope", "per-post");
  if (scope == "per-post") {
    cfg.scope = MetricScope::per_post;
  } else if (scope == "per-community") {
    cfg.scope = MetricScope::per_community;
  } else {
    bad("scope must be \"per-post\" or \"per-community\"");
  }

  std::string variant = opt_string(root, "config", "jaccard_variant", "remaining");
  if (variant == "remaining") {
    cfg.variant = JaccardVariant::remaining;
  } else if (variant == "removed") {
    cfg.variant = JaccardVariant::removed;
  } else {
    bad("jaccard_variant must be \"remaining\" or \"removed\"");
  }

  if (!root.contains("scorer") || !root["scorer"].is_object()) bad("missing \"scorer\" object");
  const json& scorer = root["scorer"];
  std::string scorer_kind = need_string(scorer, "scorer", "kind");
  if (scorer_kind == "lexicon") {
    reject_unknown(scorer, "scorer", {"kind", "lexicon_path"});
    cfg.scorer.kind = ScorerSpec::Kind::lexicon;
    cfg.scorer.lexicon_path =
        resolve_path(cfg.config_dir, need_string(scorer, "scorer", "lexicon_path"));
  } else if (scorer_kind == "remote") {
    reject_unknown(scorer, "scorer",
                   {"kind", "endpoint", "api_key_env", "model_version", "max_attempts",
                    "backoff_base_ms", "rate_per_sec", "max_in_flight"});
    cfg.scorer.kind = ScorerSpec::Kind::remote;
    cfg.scorer.endpoint = need_string(scorer, "scorer", "endpoint");
    cfg.scorer.model_version = opt_string(scorer, "scorer", "model_version", "");
    std::string key_env = opt_string(scorer, "scorer", "api_key_env", "");
    if (!key_env.empty()) {
      const char* value = std::getenv(key_env.c_str());
      if (value == nullptr || *value == '\0') {
        bad("environment variable " + key_env + " is not set");
      }
      cfg.scorer.api_key = value;
    }
    cfg.scorer.max_attempts =
        static_cast<int>(opt_int(scorer, "scorer", "max_attempts", cfg.scorer.max_attempts));
    if (cfg.scorer.max_attempts < 1) bad("max_attempts must be at least 1");
    cfg.scorer.backoff_base_ms =
        opt_number(scorer, "scorer", "backoff_base_ms", cfg.scorer.backoff_base_ms);
    if (cfg.scorer.backoff_base_ms < 0.0) bad("backoff_base_ms must be non-negative");
    cfg.scorer.rate_per_sec =
        opt_number(scorer, "scorer", "rate_per_sec", cfg.scorer.rate_per_sec);
    if (cfg.scorer.rate_per_sec < 0.0) bad("rate_per_sec must be non-negative");
    cfg.scorer.max_in_flight =
        static_cast<int>(opt_int(scorer, "scorer", "max_in_flight", cfg.scorer.max_in_flight));
    if (cfg.scorer.max_in_flight < 1) bad("max_in_flight must be at least 1");
  } else if (scorer_kind == "cache-only") {
    reject_unknown(scorer, "scorer", {"kind", "scorer_id"});
    cfg.scorer.kind = ScorerSpec::Kind::cache_only;
    cfg.scorer.scorer_id = need_string(scorer, "scorer", "scorer_id");
  } else {
    bad("scorer kind must be \"lexicon\", \"remote\", or \"cache-only\"");
  }

  if (!root.contains("provider") || !root["provider"].is_object()) {
    bad("missing \"provider\" object");
  }
  const json& provider = root["provider"];
  std::string provider_kind = need_string(provider, "provider", "kind");
  if (provider_kind == "term-frequency") {
    reject_unknown(provider, "provider", {"kind"});
    cfg.provider.kind = ProviderSpec::Kind::term_frequency;
  } else if (provider_kind == "file") {
    reject_unknown(provider, "provider", {"kind", "path"});
    cfg.provider.kind = ProviderSpec::Kind::file;
    cfg.provider.path = resolve_path(cfg.config_dir, need_string(provider, "provider", "path"));
  } else if (provider_kind == "remote") {
    reject_unknown(provider, "provider", {"kind", "endpoint"});
    cfg.provider.kind = ProviderSpec::Kind::remote;
    cfg.provider.endpoint = need_string(provider, "provider", "endpoint");
  } else {
    bad("provider kind must be \"term-frequency\", \"file\", or \"remote\"");
  }

  if (!root.contains("profiles") || !root["profiles"].is_object()) {
    bad("missing \"profiles\" object");
  }
  const json& profiles = root["profiles"];
  std::string profile_kind = need_string(profiles, "profiles", "kind");
  if (profile_kind == "list") {
    reject_unknown(profiles, "profiles", {"kind", "thresholds"});
    cfg.profiles.kind = ProfileSpec::Kind::list;
    if (!profiles.contains("thresholds") || !profiles["thresholds"].is_array() ||
        profiles["thresholds"].empty()) {
      bad("profiles.thresholds must be a nonempty array");
    }
    for (const auto& t : profiles["thresholds"]) {
      if (!t.is_number()) bad("profiles.thresholds entries must be numbers");
      double v = t.get<double>();
      if (!(v >= 0.0 && v <= 1.0)) bad("profile thresholds must lie in [0,1]");
      cfg.profiles.thresholds.push_back(v);
    }
  } else if (profile_kind == "beta") {
    reject_unknown(profiles, "profiles", {"kind", "alpha", "beta", "count"});
    cfg.profiles.kind = ProfileSpec::Kind::beta;
    cfg.profiles.alpha = opt_number(profiles, "profiles", "alpha", cfg.profiles.alpha);
    cfg.profiles.beta = opt_number(profiles, "profiles", "beta", cfg.profiles.beta);
    if (!(cfg.profiles.alpha > 0.0) || !(cfg.profiles.beta > 0.0)) {
      bad("profiles alpha and beta must be positive");
    }
    cfg.profiles.count = need_int(profiles, "profiles", "count");
    if (cfg.profiles.count < 1) bad("profiles.count must be at least 1");
  } else {
    bad("profiles kind must be \"list\" or \"beta\"");
  }

  cfg.out_dir = opt_string(root, "config", "out_dir", "");
  if (!cfg.out_dir.empty()) cfg.out_dir = resolve_path(cfg.config_dir, cfg.out_dir);
  cfg.cache_path = opt_string(root, "config", "cache_path", "");
  if (!cfg.cache_path.empty()) cfg.cache_path = resolve_path(cfg.config_dir, cfg.cache_path);
  cfg.stopwords_path = opt_string(root, "config", "stopwords_path", "");
  if (!cfg.stopwords_path.empty()) {
    cfg.stopwords_path = resolve_path(cfg.config_dir, cfg.stopwords_path);
  }
  cfg.lemmas_path = opt_string(root, "config", "lemmas_path", "");
  if (!cfg.lemmas_path.empty()) cfg.lemmas_path = resolve_path(cfg.config_dir, cfg.lemmas_path);

  return cfg;
}

}  // namespace pcm
