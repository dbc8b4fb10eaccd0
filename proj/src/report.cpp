#include "pcm/report.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>

#include "pcm/errors.hpp"
#include "pcm/hash.hpp"
#include "pcm/version.hpp"

namespace pcm {

namespace {

constexpr double kWidth = 800.0, kHeight = 480.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 20.0, kBottom = 50.0;

std::string f2(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string f1(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", x);
  return buf;
}

double px(double t) { return kLeft + t * (kWidth - kLeft - kRight); }
double py(double v) { return (kHeight - kBottom) - v * (kHeight - kBottom - kTop); }

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

// shared chart frame: background, unit grid, axes, tick labels, axis titles
void frame_open(std::string& svg, const std::string& hash, const std::string& x_label,
                const std::string& y_label) {
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"480\" "
         "viewBox=\"0 0 800 480\">\n";
  svg += "<metadata>manifest_hash=" + hash + "</metadata>\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"480\" fill=\"#ffffff\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    double v = static_cast<double>(i) / 5.0;
    svg += "<line x1=\"" + f2(px(v)) + "\" y1=\"" + f2(py(0.0)) + "\" x2=\"" + f2(px(v)) +
           "\" y2=\"" + f2(py(1.0)) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + f2(px(0.0)) + "\" y1=\"" + f2(py(v)) + "\" x2=\"" + f2(px(1.0)) +
           "\" y2=\"" + f2(py(v)) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
  }
  svg += "<line x1=\"" + f2(px(0.0)) + "\" y1=\"" + f2(py(0.0)) + "\" x2=\"" + f2(px(1.0)) +
         "\" y2=\"" + f2(py(0.0)) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + f2(px(0.0)) + "\" y1=\"" + f2(py(0.0)) + "\" x2=\"" + f2(px(0.0)) +
         "\" y2=\"" + f2(py(1.0)) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    double v = static_cast<double>(i) / 5.0;
    svg += "<text x=\"" + f2(px(v)) + "\" y=\"" + f2(py(0.0) + 18.0) +
           "\" font-family=\"monospace\" font-size=\"12\" fill=\"#333333\" "
           "text-anchor=\"middle\">" + f1(v) + "</text>\n";
    svg += "<text x=\"" + f2(px(0.0) - 8.0) + "\" y=\"" + f2(py(v) + 4.0) +
           "\" font-family=\"monospace\" font-size=\"12\" fill=\"#333333\" "
           "text-anchor=\"end\">" + f1(v) + "</text>\n";
  }
  svg += "<text x=\"" + f2((px(0.0) + px(1.0)) / 2.0) + "\" y=\"" + f2(kHeight - 12.0) +
         "\" font-family=\"monospace\" font-size=\"14\" fill=\"#333333\" "
         "text-anchor=\"middle\">" + x_label + "</text>\n";
  svg += "<text x=\"18\" y=\"" + f2((py(0.0) + py(1.0)) / 2.0) +
         "\" font-family=\"monospace\" font-size=\"14\" fill=\"#333333\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         f2((py(0.0) + py(1.0)) / 2.0) + ")\">" + y_label + "</text>\n";
}

const AggregateCurve& curve_by_name(const std::vector<AggregateCurve>& curves,
                                    const std::string& name) {
  for (const AggregateCurve& c : curves) {
    if (c.metric == name) return c;
  }
  throw error(errc::empty_rows, "no aggregate curve named " + name);
}

double parse_field_double(const std::string& field, const std::string& path, size_t line_no) {
  if (field.empty()) {
    throw error(errc::malformed_record,
                path + ":" + std::to_string(line_no) + ": empty numeric field");
  }
  char* end = nullptr;
  double v = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size()) {
    throw error(errc::malformed_record,
                path + ":" + std::to_string(line_no) + ": bad number \"" + field + "\"");
  }
  return v;
}

}  // namespace

std::string f9(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", x);
  return buf;
}

std::string manifest_json(const Manifest& manifest, const std::string& with_hash) {
  std::string out;
  out += "{\n";
  out += "  \"schema_version\": 1,\n";
  out += std::string("  \"tool\": \"") + kToolName + "\",\n";
  out += std::string("  \"tool_version\": \"") + kToolVersion + "\",\n";
  out += "  \"config_sha256\": \"" + manifest.config_sha256 + "\",\n";
  out += "  \"community\": \"" + manifest.community + "\",\n";
  out += "  \"window\": {\"from_utc\": " + std::to_string(manifest.window_from) +
         ", \"to_utc\": " + std::to_string(manifest.window_to) + "},\n";
  out += "  \"top_posts\": " + std::to_string(manifest.top_posts) + ",\n";
  out += "  \"k\": " + std::to_string(manifest.k) + ",\n";
  out += "  \"grid\": {\"start\": " + f9(manifest.grid.start) +
         ", \"end\": " + f9(manifest.grid.end) + ", \"step\": " + f9(manifest.grid.step) +
         "},\n";
  out += "  \"scope\": \"" + manifest.scope + "\",\n";
  out += "  \"jaccard_variant\": \"" + manifest.jaccard_variant + "\",\n";
  out += "  \"seed\": " + std::to_string(manifest.seed) + ",\n";
  out += "  \"scorer_id\": \"" + manifest.scorer_id + "\",\n";
  out += "  \"provider_id\": \"" + manifest.provider_id + "\",\n";
  out += "  \"stopword_list_id\": \"" + manifest.stopword_list_id + "\",\n";
  out += "  \"lemma_table_id\": \"" + manifest.lemma_table_id + "\",\n";
  if (with_hash.empty()) {
    out += "  \"token_rule\": \"" + manifest.token_rule + "\"\n";
  } else {
    out += "  \"token_rule\": \"" + manifest.token_rule + "\",\n";
    out += "  \"manifest_hash\": \"" + with_hash + "\"\n";
  }
  out += "}\n";
  return out;
}

std::string manifest_hash(const Manifest& manifest) {
  return sha16(manifest_json(manifest, ""));
}

std::string rows_csv_text(std::vector<SweepRow> rows, const std::string& hash) {
  if (rows.empty()) throw error(errc::empty_rows, "refusing to write an empty rows file");
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.community != b.community) return a.community < b.community;
    if (a.post_id != b.post_id) return a.post_id < b.post_id;
    return a.threshold < b.threshold;
  });
  std::string out = "community,post_id,threshold,removal_rate,info_loss,jaccard\n";
  for (const SweepRow& row : rows) {
    out += row.community + "," + row.post_id + "," + f9(row.threshold) + "," +
           f9(row.removal_rate) + "," + f9(row.info_loss) + "," + f9(row.jaccard) + "\n";
  }
  out += "# manifest_hash=" + hash + "\n";
  return out;
}

std::string aggregates_csv_text(std::vector<AggregateCurve> curves, const std::string& hash) {
  if (curves.empty()) throw error(errc::empty_rows, "no aggregate curves");
  std::sort(curves.begin(), curves.end(),
            [](const AggregateCurve& a, const AggregateCurve& b) { return a.metric < b.metric; });
  std::string out = "metric,threshold,mean,sd,n_posts\n";
  for (const AggregateCurve& curve : curves) {
    for (const AggregatePoint& p : curve.points) {
      out += curve.metric + "," + f9(p.threshold) + "," + f9(p.mean) + "," + f9(p.sd) + "," +
             std::to_string(p.n_posts) + "\n";
    }
  }
  out += "# manifest_hash=" + hash + "\n";
  return out;
}

std::string ail_csv_text(const AILReport& report, const std::vector<UserProfile>& profiles,
                         const std::string& community, const std::string& hash) {
  std::map<std::string, double> thresholds;
  for (const UserProfile& p : profiles) thresholds[p.user_id] = p.threshold;
  std::string out = "community,post_id,user_id,threshold,loss\n";
  for (const auto& [post_id, stat] : report.per_post) {
    for (const auto& [user_id, loss] : stat.losses) {
      auto it = thresholds.find(user_id);
      if (it == thresholds.end()) {
        throw error(errc::empty_profiles, "no profile for user " + user_id);
      }
      out += community + "," + post_id + "," + user_id + "," + f9(it->second) + "," + f9(loss) +
             "\n";
    }
  }
  out += "# manifest_hash=" + hash + "\n";
  return out;
}

std::string summary_json_text(const SummaryData& summary, const std::string& hash) {
  std::string out;
  out += "{\n";
  out += "  \"schema_version\": 1,\n";
  out += "  \"manifest_hash\": \"" + hash + "\",\n";
  out += "  \"community\": \"" + summary.community + "\",\n";
  out += "  \"stats\": {\n";
  out += "    \"post_count\": " + std::to_string(summary.stats.post_count) + ",\n";
  out += "    \"total_comments\": " + std::to_string(summary.stats.total_comments) + ",\n";
  out += "    \"min_comments_per_post\": " + std::to_string(summary.stats.min_comments_per_post) +
         ",\n";
  out += "    \"max_comments_per_post\": " + std::to_string(summary.stats.max_comments_per_post) +
         "\n";
  out += "  },\n";
  out += "  \"toxicity\": {\"mean\": " + f9(summary.toxicity.mean) +
         ", \"sd\": " + f9(summary.toxicity.sd) + ", \"n\": " + std::to_string(summary.toxicity.n) +
         "},\n";
  out += "  \"curves\": {\n";
  const char* names[3] = {"removal_rate", "info_loss", "jaccard"};
  for (int mi = 0; mi < 3; ++mi) {
    const AggregateCurve& curve = curve_by_name(summary.curves, names[mi]);
    out += std::string("    \"") + names[mi] + "\": [\n";
    for (size_t i = 0; i < curve.points.size(); ++i) {
      const AggregatePoint& p = curve.points[i];
      out += "      {\"threshold\": " + f9(p.threshold) + ", \"mean\": " + f9(p.mean) +
             ", \"sd\": " + f9(p.sd) + ", \"n_posts\": " + std::to_string(p.n_posts) + "}";
      out += (i + 1 < curve.points.size()) ? ",\n" : "\n";
    }
    out += (mi < 2) ? "    ],\n" : "    ]\n";
  }
  out += "  },\n";
  out += "  \"ail\": {\n";
  out += "    \"per_post\": [\n";
  for (size_t i = 0; i < summary.ail.per_post.size(); ++i) {
    const auto& [post_id, stat] = summary.ail.per_post[i];
    out += "      {\"post_id\": \"" + post_id + "\", \"std\": " + f9(stat.std_dev) +
           ", \"range\": " + f9(stat.range) +
           ", \"n_users\": " + std::to_string(stat.losses.size()) + "}";
    out += (i + 1 < summary.ail.per_post.size()) ? ",\n" : "\n";
  }
  out += "    ],\n";
  out += "    \"corpus_mean_std\": " + f9(summary.ail.corpus_mean_std) + "\n";
  out += "  }\n";
  out += "}\n";
  return out;
}

std::string curve_svg_text(const AggregateCurve& curve, const std::string& hash) {
  if (curve.points.size() < 2) {
    throw error(errc::too_few_points, curve.metric + " needs at least 2 grid points");
  }
  std::string svg;
  frame_open(svg, hash, "threshold", curve.metric);
  std::string band;
  for (const AggregatePoint& p : curve.points) {
    band += f2(px(p.threshold)) + "," + f2(py(clamp01(p.mean + p.sd))) + " ";
  }
  for (size_t i = curve.points.size(); i-- > 0;) {
    const AggregatePoint& p = curve.points[i];
    band += f2(px(p.threshold)) + "," + f2(py(clamp01(p.mean - p.sd)));
    if (i > 0) band += " ";
  }
  svg += "<polygon fill=\"#aec7e8\" fill-opacity=\"0.5\" points=\"" + band + "\"/>\n";
  std::string line;
  for (size_t i = 0; i < curve.points.size(); ++i) {
    const AggregatePoint& p = curve.points[i];
    line += f2(px(p.threshold)) + "," + f2(py(clamp01(p.mean)));
    if (i + 1 < curve.points.size()) line += " ";
  }
  svg += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"" + line +
         "\"/>\n";
  svg += "</svg>\n";
  return svg;
}

std::string scatter_svg_text(const std::vector<std::pair<double, double>>& pairs,
                             const std::string& hash) {
  if (pairs.empty()) throw error(errc::too_few_points, "scatter needs at least 1 point");
  std::string svg;
  frame_open(svg, hash, "info_loss", "jaccard");
  for (const auto& [loss, jac] : pairs) {
    svg += "<circle cx=\"" + f2(px(clamp01(loss))) + "\" cy=\"" + f2(py(clamp01(jac))) +
           "\" r=\"3\" fill=\"#1f77b4\" fill-opacity=\"0.35\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw error(errc::io_failure, "cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out.good()) throw error(errc::io_failure, "short write to " + path);
}

void write_rows_csv(const std::vector<SweepRow>& rows, const std::string& hash,
                    const std::string& path) {
  write_text_file(path, rows_csv_text(rows, hash));
}

RowsFile read_rows_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io_failure, "cannot open " + path);
  RowsFile out;
  std::string line;
  size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string tag = "# manifest_hash=";
      if (line.rfind(tag, 0) == 0) out.hash = line.substr(tag.size());
      continue;
    }
    if (!saw_header) {
      if (line != "community,post_id,threshold,removal_rate,info_loss,jaccard") {
        throw error(errc::malformed_record, path + ": unexpected header \"" + line + "\"");
      }
      saw_header = true;
      continue;
    }
    std::vector<std::string> fields;
    size_t start = 0;
    for (;;) {
      size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() != 6) {
      throw error(errc::malformed_record,
                  path + ":" + std::to_string(line_no) + ": expected 6 fields");
    }
    SweepRow row;
    row.community = fields[0];
    row.post_id = fields[1];
    row.threshold = parse_field_double(fields[2], path, line_no);
    row.removal_rate = parse_field_double(fields[3], path, line_no);
    row.info_loss = parse_field_double(fields[4], path, line_no);
    row.jaccard = parse_field_double(fields[5], path, line_no);
    out.rows.push_back(std::move(row));
  }
  if (!saw_header) throw error(errc::malformed_record, path + ": missing header");
  if (out.hash.empty()) {
    throw error(errc::malformed_record, path + ": missing manifest_hash trailer");
  }
  return out;
}

void render_curve_svg(const AggregateCurve& curve, const std::string& hash,
                      const std::string& path) {
  write_text_file(path, curve_svg_text(curve, hash));
}

ReportBundle write_bundle(const std::string& out_dir, const Manifest& manifest,
                          const std::vector<SweepRow>& rows, const SummaryData& summary,
                          const std::vector<UserProfile>& profiles) {
  const std::string hash = manifest_hash(manifest);

  // render everything before touching the filesystem
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("manifest.json", manifest_json(manifest, hash));
  files.emplace_back("rows.csv", rows_csv_text(rows, hash));
  files.emplace_back("aggregates.csv", aggregates_csv_text(summary.curves, hash));
  files.emplace_back("ail.csv",
                     ail_csv_text(summary.ail, profiles, summary.community, hash));
  files.emplace_back("summary.json", summary_json_text(summary, hash));
  files.emplace_back("fig_removal_rate.svg",
                     curve_svg_text(curve_by_name(summary.curves, "removal_rate"), hash));
  files.emplace_back("fig_info_loss.svg",
                     curve_svg_text(curve_by_name(summary.curves, "info_loss"), hash));
  files.emplace_back("fig_jaccard.svg",
                     curve_svg_text(curve_by_name(summary.curves, "jaccard"), hash));
  files.emplace_back("fig_loss_vs_jaccard.svg",
                     scatter_svg_text(loss_jaccard_pairs(rows), hash));

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw error(errc::io_failure, "cannot create " + out_dir + ": " + ec.message());

  // stage under temporary names, then rename into place; on any failure
  // every staged and already-renamed file is removed again
  std::vector<std::string> staged;
  std::vector<std::string> finalized;
  ReportBundle bundle;
  bundle.dir = out_dir;
  bundle.hash = hash;
  try {
    for (const auto& [name, content] : files) {
      std::string tmp = out_dir + "/." + name + ".tmp";
      write_text_file(tmp, content);
      staged.push_back(tmp);
    }
    for (size_t i = 0; i < files.size(); ++i) {
      std::string final_path = out_dir + "/" + files[i].first;
      std::filesystem::rename(staged[i], final_path, ec);
      if (ec) {
        staged.erase(staged.begin(), staged.begin() + static_cast<long>(i));
        throw error(errc::io_failure,
                    "cannot finalize " + files[i].first + ": " + ec.message());
      }
      finalized.push_back(final_path);
      bundle.files.push_back(files[i].first);
    }
  } catch (...) {
    std::error_code ignore;
    for (const std::string& p : staged) std::filesystem::remove(p, ignore);
    for (const std::string& p : finalized) std::filesystem::remove(p, ignore);
    throw;
  }
  return bundle;
}

}  // namespace pcm
