#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pcm/corpus.hpp"
#include "pcm/textpipe.hpp"

namespace pcm {

struct EmbeddingVector {
  std::vector<double> components;

  size_t dim() const { return components.size(); }
  bool operator==(const EmbeddingVector&) const = default;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual EmbeddingVector embed(const std::string& text) = 0;
  virtual const std::string& id() const = 0;
};

// sorted distinct tokens across the given (unmoderated) documents
std::vector<std::string> build_vocab(const std::vector<std::vector<std::string>>& docs);

// per-vocab-entry counts, L2-normalized; all-zero counts stay a zero vector
EmbeddingVector embed_tf(const std::vector<std::string>& tokens,
                         const std::vector<std::string>& vocab);

// corpus-vocabulary term-frequency embeddings; the default provider
class TfProvider : public EmbeddingProvider {
 public:
  TfProvider(std::vector<std::string> vocab, PipelineConfig pipeline);

  EmbeddingVector embed(const std::string& text) override;
  const std::string& id() const override { return id_; }

  // fast path for callers that already hold per-vocab counts
  EmbeddingVector embed_counts(const std::vector<double>& counts) const;
  std::vector<double> count_tokens(const std::vector<std::string>& tokens) const;

  const std::vector<std::string>& vocab() const { return vocab_; }
  const PipelineConfig& pipeline() const { return pipeline_; }

 private:
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, size_t> index_;
  PipelineConfig pipeline_;
  std::string id_;
};

// precomputed vectors keyed by SHA-256 of the exact document text, loaded
// from a JSONL file of {text_sha256, dim, components}
class FileProvider : public EmbeddingProvider {
 public:
  explicit FileProvider(const std::string& path);
  EmbeddingVector embed(const std::string& text) override;
  const std::string& id() const override { return id_; }

 private:
  std::unordered_map<std::string, EmbeddingVector> vectors_;
  std::string id_;
};

// embedding service client: POST the document text, receive {dim, components}
class RemoteProvider : public EmbeddingProvider {
 public:
  explicit RemoteProvider(const std::string& endpoint);
  EmbeddingVector embed(const std::string& text) override;
  const std::string& id() const override { return id_; }

 private:
  std::string endpoint_;
  std::string id_;
};

// dot(u,v) / (|u||v|), clamped to [-1,1]; 0 when either norm is zero;
// exactly 1 for identical nonzero vectors
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

// 1 - cosine of the two documents' embeddings; empty moderated text loses
// everything (1.0) via the zero-vector convention
double info_loss(const std::string& original_doc, const std::string& moderated_doc,
                 EmbeddingProvider& provider);

// |A∩B| / |A∪B|; both sets empty -> 1.0
double jaccard(const std::unordered_set<std::string>& a,
               const std::unordered_set<std::string>& b);

// Jaccard overlap between the thread's original top-k word set and the
// top-k set of what survives moderation at the given threshold
double polarization_at(const Thread& thread, double threshold,
                       const PipelineConfig& pipeline, int k);

struct UserProfile {
  std::string user_id;
  double threshold = 1.0;
};

// per-profile information loss of the moderated view, in profile order
std::vector<std::pair<std::string, double>> user_losses(
    const Thread& thread, const std::vector<UserProfile>& profiles,
    EmbeddingProvider& provider);

struct AILStat {
  std::vector<std::pair<std::string, double>> losses;  // user id ascending
  double std_dev = 0.0;  // sample; exactly 0 when losses agree within 1e-12
  double range = 0.0;    // max - min
};

AILStat ail(const std::vector<std::pair<std::string, double>>& losses);

}  // namespace pcm
