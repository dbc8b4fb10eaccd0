#include "pcm/cli.hpp"

#include <filesystem>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "pcm/config.hpp"
#include "pcm/corpus.hpp"
#include "pcm/errors.hpp"
#include "pcm/ingest.hpp"
#include "pcm/metrics.hpp"
#include "pcm/moderation.hpp"
#include "pcm/report.hpp"
#include "pcm/sweep.hpp"
#include "pcm/textpipe.hpp"
#include "pcm/toxicity.hpp"
#include "pcm/version.hpp"

namespace pcm {

namespace {

struct LoadedCorpus {
  Corpus corpus;
  long long dropped_comments = 0;
};

LoadedCorpus load_corpus(const RunConfig& cfg) {
  std::vector<Post> posts;
  for (Post& p : read_posts_jsonl(cfg.posts_path)) {
    if (p.community == cfg.community) posts.push_back(std::move(p));
  }
  std::vector<Comment> comments = read_comments_jsonl(cfg.comments_path);
  AssembleResult assembled = assemble_threads(posts, comments);

  LoadedCorpus out;
  out.dropped_comments = assembled.dropped_comments;
  out.corpus.community = cfg.community;
  out.corpus.window_from = cfg.window_from;
  out.corpus.window_to = cfg.window_to;
  out.corpus.threads =
      select_top_posts(assembled.threads, cfg.top_posts, cfg.window_from, cfg.window_to);
  if (out.corpus.threads.empty()) {
    throw error(errc::empty_corpus,
                "no posts for community \"" + cfg.community + "\" inside the window");
  }
  return out;
}

PipelineConfig make_pipeline(const RunConfig& cfg) {
  if (cfg.stopwords_path.empty() && cfg.lemmas_path.empty()) return default_pipeline(cfg.k);
  return pipeline_from_files(cfg.stopwords_path, cfg.lemmas_path, cfg.k);
}

std::unique_ptr<EmbeddingProvider> make_provider(const RunConfig& cfg, const Corpus& corpus,
                                                 const PipelineConfig& pipeline) {
  switch (cfg.provider.kind) {
    case ProviderSpec::Kind::file:
      return std::make_unique<FileProvider>(cfg.provider.path);
    case ProviderSpec::Kind::remote:
      return std::make_unique<RemoteProvider>(cfg.provider.endpoint);
    case ProviderSpec::Kind::term_frequency:
    default:
      return std::make_unique<TfProvider>(corpus_vocab(corpus, pipeline), pipeline);
  }
}

std::string resolve_out_dir(const RunConfig& cfg, const std::string& flag, const char* who) {
  if (!flag.empty()) return flag;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  throw error(errc::config_error,
              std::string(who) + " needs an output directory (--out or config out_dir)");
}

std::string resolve_cache_path(const RunConfig& cfg, const std::string& out_dir) {
  if (!cfg.cache_path.empty()) return cfg.cache_path;
  return out_dir + "/score_cache.jsonl";
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw error(errc::io_failure, "cannot create " + dir + ": " + ec.message());
}

void print_stats(const Corpus& corpus, long long dropped) {
  CommunityStats stats = corpus_stats(corpus);
  std::cout << "community: " << corpus.community << "\n";
  std::cout << "posts: " << stats.post_count << "\n";
  std::cout << "comments: " << stats.total_comments << "\n";
  std::cout << "min_comments_per_post: " << stats.min_comments_per_post << "\n";
  std::cout << "max_comments_per_post: " << stats.max_comments_per_post << "\n";
  std::cout << "dropped_comments: " << dropped << "\n";
}

void run_ingest(const RunConfig& cfg) {
  LoadedCorpus loaded = load_corpus(cfg);
  print_stats(loaded.corpus, loaded.dropped_comments);
}

void run_score(const RunConfig& cfg, const std::string& out_flag) {
  LoadedCorpus loaded = load_corpus(cfg);
  PipelineConfig pipeline = make_pipeline(cfg);
  std::unique_ptr<Scorer> scorer = make_scorer(cfg.scorer, pipeline);

  std::string cache_path = cfg.cache_path;
  if (cache_path.empty()) {
    std::string out_dir = resolve_out_dir(cfg, out_flag, "score");
    ensure_dir(out_dir);
    cache_path = resolve_cache_path(cfg, out_dir);
  }
  ScoreCache cache(cache_path);
  size_t before = cache.size();
  score_corpus(loaded.corpus, cache, *scorer);
  std::cout << "scorer_id: " << scorer->id() << "\n";
  std::cout << "cache: " << cache_path << "\n";
  std::cout << "cache_entries: " << cache.size() << " (" << (cache.size() - before)
            << " new)\n";
}

void run_sweep_command(const RunConfig& cfg, const std::string& out_flag, int workers_flag,
                       bool print_corpus_stats) {
  LoadedCorpus loaded = load_corpus(cfg);
  if (print_corpus_stats) print_stats(loaded.corpus, loaded.dropped_comments);

  PipelineConfig pipeline = make_pipeline(cfg);
  std::unique_ptr<EmbeddingProvider> provider = make_provider(cfg, loaded.corpus, pipeline);
  std::unique_ptr<Scorer> scorer = make_scorer(cfg.scorer, pipeline);

  std::string out_dir = resolve_out_dir(cfg, out_flag, "sweep");
  ensure_dir(out_dir);
  ScoreCache cache(resolve_cache_path(cfg, out_dir));

  SweepOptions options;
  options.k = cfg.k;
  options.scope = cfg.scope;
  options.variant = cfg.variant;
  options.workers = workers_flag >= 0 ? workers_flag : cfg.workers;

  std::vector<SweepRow> rows =
      run_sweep(loaded.corpus, cfg.grid, pipeline, *provider, cache, *scorer, options);

  SummaryData summary;
  summary.community = cfg.community;
  summary.stats = corpus_stats(loaded.corpus);
  summary.curves = aggregate(rows);
  std::vector<UserProfile> profiles = make_profiles(cfg.profiles, cfg.seed);
  summary.ail = ail_report(loaded.corpus, profiles, *provider, cache, *scorer);
  std::vector<double> scores;
  for (const Thread& t : loaded.corpus.threads) {
    for (const Comment& c : t.comments) {
      if (!c.pre_deleted) scores.push_back(*c.toxicity);
    }
  }
  summary.toxicity = toxicity_summary(scores);

  Manifest manifest;
  manifest.config_sha256 = cfg.config_sha256;
  manifest.community = cfg.community;
  manifest.window_from = cfg.window_from;
  manifest.window_to = cfg.window_to;
  manifest.top_posts = cfg.top_posts;
  manifest.k = cfg.k;
  manifest.grid = cfg.grid;
  manifest.scope = scope_name(cfg.scope);
  manifest.jaccard_variant = variant_name(cfg.variant);
  manifest.seed = cfg.seed;
  manifest.scorer_id = scorer->id();
  manifest.provider_id = provider->id();
  manifest.stopword_list_id = pipeline.stopword_list_id;
  manifest.lemma_table_id = pipeline.lemma_table_id;
  manifest.token_rule = pipeline.token_rule;

  ReportBundle bundle = write_bundle(out_dir, manifest, rows, summary, profiles);
  std::cout << "rows: " << rows.size() << "\n";
  std::cout << "bundle: " << bundle.dir << "\n";
  std::cout << "manifest_hash: " << bundle.hash << "\n";
}

void run_report(const std::string& rows_path, const std::string& out_dir) {
  RowsFile rf = read_rows_csv(rows_path);
  std::vector<AggregateCurve> curves = aggregate(rf.rows);
  ensure_dir(out_dir);
  write_text_file(out_dir + "/aggregates.csv", aggregates_csv_text(curves, rf.hash));
  const char* names[3] = {"removal_rate", "info_loss", "jaccard"};
  for (const char* name : names) {
    for (const AggregateCurve& curve : curves) {
      if (curve.metric == name) {
        write_text_file(out_dir + "/fig_" + name + ".svg", curve_svg_text(curve, rf.hash));
      }
    }
  }
  write_text_file(out_dir + "/fig_loss_vs_jaccard.svg",
                  scatter_svg_text(loss_jaccard_pairs(rf.rows), rf.hash));
  std::cout << "report: " << out_dir << "\n";
  std::cout << "manifest_hash: " << rf.hash << "\n";
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"personalized content moderation simulator", "pcmsim"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string config_path, out_flag, rows_path;
  int workers_flag = -1;

  CLI::App* ingest = app.add_subcommand("ingest", "parse dumps, select the corpus, print stats");
  ingest->add_option("--config", config_path, "run configuration JSON")->required();

  CLI::App* score = app.add_subcommand("score", "populate the toxicity score cache");
  score->add_option("--config", config_path, "run configuration JSON")->required();
  score->add_option("--out", out_flag, "output directory (holds the default cache)");

  CLI::App* sweep = app.add_subcommand("sweep", "run the full threshold sweep and write a bundle");
  sweep->add_option("--config", config_path, "run configuration JSON")->required();
  sweep->add_option("--out", out_flag, "output directory");
  sweep->add_option("--workers", workers_flag, "worker threads (0 = hardware)");

  CLI::App* report = app.add_subcommand("report", "re-render aggregates and figures from rows");
  report->add_option("--rows", rows_path, "rows CSV from an earlier sweep")->required();
  report->add_option("--out", out_flag, "output directory")->required();

  CLI::App* all = app.add_subcommand("all", "ingest, score, and sweep in one run");
  all->add_option("--config", config_path, "run configuration JSON")->required();
  all->add_option("--out", out_flag, "output directory");
  all->add_option("--workers", workers_flag, "worker threads (0 = hardware)");

  if (argc <= 1) {
    std::cerr << app.help();
    return 1;
  }

  try {
    app.parse(argc, argv);
    if (ingest->parsed()) {
      run_ingest(load_run_config(config_path));
    } else if (score->parsed()) {
      run_score(load_run_config(config_path), out_flag);
    } else if (sweep->parsed()) {
      run_sweep_command(load_run_config(config_path), out_flag, workers_flag, false);
    } else if (report->parsed()) {
      run_report(rows_path, out_flag);
    } else if (all->parsed()) {
      run_sweep_command(load_run_config(config_path), out_flag, workers_flag, true);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.emplace_back("pcmsim");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const std::string& s : full) argv.push_back(s.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace pcm
