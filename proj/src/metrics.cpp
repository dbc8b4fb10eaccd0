#include "pcm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "pcm/errors.hpp"
#include "pcm/hash.hpp"
#include "pcm/moderation.hpp"
#include "pcm/stats.hpp"

namespace pcm {

namespace {

using json = nlohmann::json;

// L2-normalize in place, accumulating in ascending index order; a zero
// vector is left untouched
void l2_normalize(std::vector<double>& components) {
  double sumsq = 0.0;
  for (double v : components) sumsq += v * v;
  if (sumsq == 0.0) return;
  double norm = std::sqrt(sumsq);
  for (double& v : components) v /= norm;
}

}  // namespace

std::vector<std::string> build_vocab(const std::vector<std::vector<std::string>>& docs) {
  std::set<std::string> vocab;
  for (const auto& doc : docs) vocab.insert(doc.begin(), doc.end());
  if (vocab.empty()) throw error(errc::empty_vocabulary, "documents contain no tokens");
  return std::vector<std::string>(vocab.begin(), vocab.end());
}

EmbeddingVector embed_tf(const std::vector<std::string>& tokens,
                         const std::vector<std::string>& vocab) {
  std::unordered_map<std::string, size_t> index;
  index.reserve(vocab.size());
  for (size_t i = 0; i < vocab.size(); ++i) index.emplace(vocab[i], i);
  EmbeddingVector vec;
  vec.components.assign(vocab.size(), 0.0);
  for (const auto& tok : tokens) {
    auto it = index.find(tok);
    if (it != index.end()) vec.components[it->second] += 1.0;
  }
  l2_normalize(vec.components);
  return vec;
}

TfProvider::TfProvider(std::vector<std::string> vocab, PipelineConfig pipeline)
    : vocab_(std::move(vocab)), pipeline_(std::move(pipeline)) {
  if (vocab_.empty()) throw error(errc::empty_vocabulary, "provider needs a vocabulary");
  index_.reserve(vocab_.size());
  for (size_t i = 0; i < vocab_.size(); ++i) index_.emplace(vocab_[i], i);
  std::string joined;
  for (const auto& w : vocab_) {
    joined += w;
    joined.push_back('\n');
  }
  id_ = "tf-l2/" + sha16(joined);
}

std::vector<double> TfProvider::count_tokens(const std::vector<std::string>& tokens) const {
  std::vector<double> counts(vocab_.size(), 0.0);
  for (const auto& tok : tokens) {
    auto it = index_.find(tok);
    if (it != index_.end()) counts[it->second] += 1.0;
  }
  return counts;
}

EmbeddingVector TfProvider::embed_counts(const std::vector<double>& counts) const {
  EmbeddingVector vec;
  vec.components = counts;
  l2_normalize(vec.components);
  return vec;
}

EmbeddingVector TfProvider::embed(const std::string& text) {
  return embed_counts(count_tokens(normalize(text, pipeline_)));
}

FileProvider::FileProvider(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io_failure, "cannot open " + path);
  std::ostringstream raw;
  raw << in.rdbuf();
  const std::string bytes = raw.str();
  id_ = "file/" + sha16(bytes);

  size_t start = 0;
  while (start < bytes.size()) {
    size_t nl = bytes.find('\n', start);
    std::string line = (nl == std::string::npos) ? bytes.substr(start)
                                                 : bytes.substr(start, nl - start);
    start = (nl == std::string::npos) ? bytes.size() : nl + 1;
    if (line.empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object() || !rec.contains("text_sha256") ||
        !rec.contains("dim") || !rec.contains("components") ||
        !rec["components"].is_array()) {
      throw error(errc::malformed_record, path + ": bad embedding record");
    }
    EmbeddingVector vec;
    for (const auto& c : rec["components"]) {
      if (!c.is_number()) throw error(errc::malformed_record, path + ": non-numeric component");
      vec.components.push_back(c.get<double>());
    }
    if (rec["dim"].get<long long>() != static_cast<long long>(vec.components.size())) {
      throw error(errc::malformed_record, path + ": dim disagrees with components");
    }
    vectors_[rec["text_sha256"].get<std::string>()] = std::move(vec);
  }
}

EmbeddingVector FileProvider::embed(const std::string& text) {
  auto it = vectors_.find(sha256_hex(text));
  if (it == vectors_.end()) {
    throw error(errc::cache_miss, "no precomputed embedding for document " + sha16(text));
  }
  return it->second;
}

RemoteProvider::RemoteProvider(const std::string& endpoint) : endpoint_(endpoint) {
  if (endpoint_.empty()) throw error(errc::config_error, "embedding endpoint is empty");
  id_ = "remote-embed/" + sha16(endpoint_);
}

EmbeddingVector RemoteProvider::embed(const std::string& text) {
  size_t scheme = endpoint_.find("://");
  if (scheme == std::string::npos) {
    throw error(errc::config_error, "endpoint must include a scheme: " + endpoint_);
  }
  size_t path_start = endpoint_.find('/', scheme + 3);
  std::string base = (path_start == std::string::npos) ? endpoint_
                                                       : endpoint_.substr(0, path_start);
  std::string path = (path_start == std::string::npos) ? "/" : endpoint_.substr(path_start);
  httplib::Client client(base);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(60, 0);
  auto res = client.Post(path, text, "text/plain");
  if (!res) throw error(errc::remote_unavailable, "embedding request failed");
  if (res->status != 200) {
    throw error(errc::remote_unavailable, "embedding status " + std::to_string(res->status));
  }
  json rec = json::parse(res->body, nullptr, false);
  if (rec.is_discarded() || !rec.is_object() || !rec.contains("dim") ||
      !rec.contains("components") || !rec["components"].is_array()) {
    throw error(errc::malformed_response, "bad embedding response");
  }
  EmbeddingVector vec;
  for (const auto& c : rec["components"]) {
    if (!c.is_number()) throw error(errc::malformed_response, "non-numeric component");
    vec.components.push_back(c.get<double>());
  }
  if (rec["dim"].get<long long>() != static_cast<long long>(vec.components.size())) {
    throw error(errc::malformed_response, "dim disagrees with components");
  }
  return vec;
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim()) {
    throw error(errc::dimension_mismatch, std::to_string(u.dim()) + " vs " +
                                              std::to_string(v.dim()));
  }
  if (u.components == v.components) {
    for (double a : u.components) {
      if (a != 0.0) return 1.0;  // identical nonzero vectors, exactly
    }
    return 0.0;  // two zero vectors fall under the zero-norm convention
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (size_t i = 0; i < u.components.size(); ++i) {
    double a = u.components[i];
    double b = v.components[i];
    dot += a * b;
    nu += a * a;
    nv += b * b;
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  double c = dot / (std::sqrt(nu) * std::sqrt(nv));
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return c;
}

double info_loss(const std::string& original_doc, const std::string& moderated_doc,
                 EmbeddingProvider& provider) {
  if (original_doc.empty()) throw error(errc::empty_original, "unmoderated document is empty");
  return 1.0 - cosine(provider.embed(original_doc), provider.embed(moderated_doc));
}

double jaccard(const std::unordered_set<std::string>& a,
               const std::unordered_set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  long long inter = 0;
  for (const auto& w : a) {
    if (b.count(w)) ++inter;
  }
  long long uni = static_cast<long long>(a.size()) + static_cast<long long>(b.size()) - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double polarization_at(const Thread& thread, double threshold,
                       const PipelineConfig& pipeline, int k) {
  ModerationPolicy policy{threshold};
  ModeratedThread mthread = apply_policy(thread, policy);

  std::vector<std::vector<std::string>> original_lists;
  for (const Comment& c : thread.comments) {
    if (!c.pre_deleted) original_lists.push_back(normalize(c.body, pipeline));
  }
  std::vector<std::vector<std::string>> surviving_lists;
  for (const Comment& c : mthread.visible_comments) {
    if (!c.pre_deleted) surviving_lists.push_back(normalize(c.body, pipeline));
  }
  TopKSet original = top_k(frequency_table(original_lists), k);
  TopKSet surviving = top_k(frequency_table(surviving_lists), k);
  return jaccard(
      std::unordered_set<std::string>(original.words.begin(), original.words.end()),
      std::unordered_set<std::string>(surviving.words.begin(), surviving.words.end()));
}

std::vector<std::pair<std::string, double>> user_losses(
    const Thread& thread, const std::vector<UserProfile>& profiles,
    EmbeddingProvider& provider) {
  if (profiles.empty()) throw error(errc::empty_profiles, "no user profiles");
  ModeratedThread unmoderated = apply_policy(thread, ModerationPolicy{1.0});
  const std::string original_doc = visible_text(unmoderated);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(profiles.size());
  for (const UserProfile& profile : profiles) {
    ModeratedThread view = apply_policy(thread, ModerationPolicy{profile.threshold});
    out.emplace_back(profile.user_id, info_loss(original_doc, visible_text(view), provider));
  }
  return out;
}

AILStat ail(const std::vector<std::pair<std::string, double>>& losses) {
  if (losses.empty()) throw error(errc::empty_input, "no losses");
  AILStat stat;
  stat.losses = losses;
  // canonical user-id order makes the dispersion independent of input order
  std::sort(stat.losses.begin(), stat.losses.end());
  std::vector<double> values;
  values.reserve(stat.losses.size());
  double lo = stat.losses.front().second, hi = lo;
  for (const auto& [user, loss] : stat.losses) {
    values.push_back(loss);
    lo = std::min(lo, loss);
    hi = std::max(hi, loss);
  }
  stat.range = hi - lo;
  // dispersion is exactly zero when every user saw the same loss
  stat.std_dev = (stat.range <= 1e-12) ? 0.0 : mean_sample_sd(values).sd;
  return stat;
}

}  // namespace pcm
