#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pcm/config.hpp"
#include "pcm/corpus.hpp"
#include "pcm/metrics.hpp"
#include "pcm/sweep.hpp"
#include "pcm/toxicity.hpp"

namespace pcm {

// fixed 9-decimal rendering used by every numeric report field
std::string f9(double x);

// identification block embedded in every output file of a run
struct Manifest {
  std::string config_sha256;
  std::string community;
  long long window_from = 0;
  long long window_to = 0;
  long long top_posts = 0;
  int k = 100;
  ThresholdGrid grid;
  std::string scope = "per-post";
  std::string jaccard_variant = "remaining";
  unsigned long long seed = 0;
  std::string scorer_id;
  std::string provider_id;
  std::string stopword_list_id;
  std::string lemma_table_id;
  std::string token_rule;
};

// 16-hex digest over the manifest serialization (without the hash field)
std::string manifest_hash(const Manifest& manifest);

// pretty-printed JSON; pass the hash to embed it as the trailing key
std::string manifest_json(const Manifest& manifest, const std::string& with_hash);

std::string rows_csv_text(std::vector<SweepRow> rows, const std::string& hash);
std::string aggregates_csv_text(std::vector<AggregateCurve> curves, const std::string& hash);
std::string ail_csv_text(const AILReport& report, const std::vector<UserProfile>& profiles,
                         const std::string& community, const std::string& hash);

struct SummaryData {
  std::string community;
  CommunityStats stats;
  ToxicitySummary toxicity;
  std::vector<AggregateCurve> curves;
  AILReport ail;
};

std::string summary_json_text(const SummaryData& summary, const std::string& hash);

// 800x480 line chart: x = threshold, y = mean with a +-1 sd band, fixed
// [0,1] domains; the manifest hash rides in <metadata>
std::string curve_svg_text(const AggregateCurve& curve, const std::string& hash);

// info-loss (x) versus jaccard (y) scatter over all rows
std::string scatter_svg_text(const std::vector<std::pair<double, double>>& pairs,
                             const std::string& hash);

void write_text_file(const std::string& path, const std::string& content);

// header `community,post_id,threshold,removal_rate,info_loss,jaccard`,
// 9-decimal floats, rows sorted (community, post_id, threshold), LF endings
void write_rows_csv(const std::vector<SweepRow>& rows, const std::string& hash,
                    const std::string& path);

struct RowsFile {
  std::vector<SweepRow> rows;
  std::string hash;
};

RowsFile read_rows_csv(const std::string& path);

void render_curve_svg(const AggregateCurve& curve, const std::string& hash,
                      const std::string& path);

struct ReportBundle {
  std::string dir;
  std::vector<std::string> files;  // basenames, write order
  std::string hash;
};

// materialize every file of a run: rows, aggregates, ail, summary,
// manifest, and the four figures. All content is rendered in memory first
// and staged through temporary names, so the bundle is complete or absent.
ReportBundle write_bundle(const std::string& out_dir, const Manifest& manifest,
                          const std::vector<SweepRow>& rows, const SummaryData& summary,
                          const std::vector<UserProfile>& profiles);

}  // namespace pcm
