#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "channelcf/channel_graph.hpp"
#include "channelcf/errors.hpp"
#include "channelcf/evaluation.hpp"
#include "channelcf/ingest.hpp"
#include "channelcf/parallel.hpp"
#include "channelcf/ratings.hpp"
#include "channelcf/similarity.hpp"

namespace {

using namespace channelcf;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct DatasetArgs {
  std::string path;
  std::string format = "ml100k";
  int scale_max = 5;
};

void add_dataset_options(CLI::App* cmd, DatasetArgs& args) {
  cmd->add_option("--data", args.path, "dataset file (or directory for netflix)")
      ->required();
  cmd->add_option("--format", args.format, "input format")
      ->check(CLI::IsMember({"ml100k", "netflix", "csv"}))
      ->capture_default_str();
  cmd->add_option("--scale", args.scale_max,
                  "rating scale for csv input (levels 1..scale)")
      ->capture_default_str();
}

// Relative paths that do not exist locally are retried under
// $CHANNELCF_DATA_DIR, so benchmark files can live in one shared place.
std::filesystem::path resolve_data_path(const std::string& path) {
  std::filesystem::path p(path);
  if (std::filesystem::exists(p) || p.is_absolute()) return p;
  if (const char* dir = std::getenv("CHANNELCF_DATA_DIR")) {
    const std::filesystem::path candidate = std::filesystem::path(dir) / p;
    if (std::filesystem::exists(candidate)) return candidate;
  }
  return p;
}

RatingsDataset load_dataset(const DatasetArgs& args) {
  const std::filesystem::path path = resolve_data_path(args.path);
  if (args.format == "ml100k") return load_movielens(path);
  if (args.format == "netflix") return load_netflix(path);
  return load_canonical_csv(path, args.scale_max);
}

std::string dataset_tag(const DatasetArgs& args) {
  return std::filesystem::path(args.path).stem().string();
}

struct ExperimentArgs {
  DatasetArgs data;
  std::vector<std::string> methods{"diffusion", "pearson"};
  std::vector<int> p_values;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::string out_dir = ".";
  std::string tag;
  bool clamp = false;
  bool strict_kappa = false;
  std::string pearson_means = "common";
  std::uint32_t top_k = 0;
  int threads = 0;
};

void add_experiment_options(CLI::App* cmd, ExperimentArgs& args) {
  add_dataset_options(cmd, args.data);
  cmd->add_option("--methods", args.methods, "similarity methods to evaluate")
      ->delimiter(',')
      ->check(CLI::IsMember({"diffusion", "pearson"}))
      ->capture_default_str();
  cmd->add_option("--seeds", args.seeds,
                  "per-run seeds; run index is the position in this list")
      ->delimiter(',');
  cmd->add_option("--out", args.out_dir, "output directory for report CSVs")
      ->capture_default_str();
  cmd->add_option("--tag", args.tag, "dataset tag in reports (default: file stem)");
  cmd->add_flag("--clamp", args.clamp, "clamp predictions into [1, scale]");
  cmd->add_flag("--strict-kappa", args.strict_kappa,
                "normalize by the signed weight sum (diffusion experiments)");
  cmd->add_option("--pearson-means", args.pearson_means,
                  "mean convention inside the correlation")
      ->check(CLI::IsMember({"common", "global"}))
      ->capture_default_str();
  cmd->add_option("--top-k", args.top_k,
                  "experimental: keep only the k strongest voters (0 = all)");
  cmd->add_option("--threads", args.threads,
                  "worker threads (0 = hardware concurrency)");
}

ExperimentOptions to_options(const ExperimentArgs& args) {
  ExperimentOptions options;
  options.predict.clamp = args.clamp;
  options.predict.strict_kappa = args.strict_kappa;
  options.predict.top_k = args.top_k;
  options.pearson_means = args.pearson_means == "common"
                              ? PearsonMeans::common_support
                              : PearsonMeans::global_training;
  options.threads = resolve_threads(args.threads);
  return options;
}

std::vector<RunSpec> to_runs(const std::vector<std::uint64_t>& seeds) {
  std::vector<RunSpec> runs;
  for (std::size_t i = 0; i < seeds.size(); ++i)
    runs.push_back({seeds[i], static_cast<int>(i)});
  return runs;
}

void write_file(const std::filesystem::path& path, auto&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  writer(out);
  if (!out) throw DataError("failed writing " + path.string());
}

void print_summary(const std::vector<EvaluationReport>& reports) {
  std::printf("%-14s %-10s %4s %10s %10s %10s\n", "dataset", "method", "p",
              "RMSE", "MAE", "fallback");
  for (const EvaluationReport& r : reports)
    std::printf("%-14s %-10s %4d %10.4f %10.4f %9.2f%%\n", r.dataset.c_str(),
                std::string(to_string(r.method)).c_str(), r.p, r.mean.rmse,
                r.mean.mae, 100.0 * r.mean.fallback_fraction);
}

int run_experiments(const ExperimentArgs& args,
                    const std::vector<int>& p_values) {
  const RatingsDataset data = load_dataset(args.data);
  const std::string tag = args.tag.empty() ? dataset_tag(args.data) : args.tag;
  std::vector<SimilarityKind> methods;
  for (const std::string& m : args.methods)
    methods.push_back(similarity_kind_from(m));
  const std::vector<RunSpec> runs = to_runs(args.seeds);
  const ExperimentOptions options = to_options(args);

  const std::vector<EvaluationReport> reports =
      density_sweep(data, tag, methods, p_values, runs, options);

  std::filesystem::create_directories(args.out_dir);
  const std::filesystem::path dir(args.out_dir);
  write_file(dir / "report.csv",
             [&](std::ostream& out) { write_report_csv(reports, out); });
  write_file(dir / "sweep.csv",
             [&](std::ostream& out) { write_wide_csv(reports, out); });
  print_summary(reports);
  std::printf("reports written to %s\n",
              std::filesystem::absolute(dir).c_str());
  return 0;
}

int cmd_stats(const DatasetArgs& args) {
  const RatingsDataset data = load_dataset(args);
  const DatasetStats stats = dataset_stats(data);
  std::printf("users    %u\n", stats.num_users);
  std::printf("items    %u\n", stats.num_items);
  std::printf("ratings  %zu\n", stats.num_ratings);
  std::printf("density  %.6f\n", stats.density);
  for (std::size_t level = 1; level < stats.histogram.size(); ++level)
    std::printf("level %zu  %zu\n", level, stats.histogram[level]);
  return 0;
}

struct DumpArgs {
  DatasetArgs data;
  std::string method = "diffusion";
  std::int64_t from = 0;
  std::int64_t to = -1;  // exclusive; -1 = all users
  std::string out_file;
  int threads = 0;
};

int cmd_dump_similarity(const DumpArgs& args) {
  const RatingsDataset data = load_dataset(args.data);
  const SimilarityKind kind = similarity_kind_from(args.method);
  const std::int64_t to = args.to < 0 ? data.num_users : args.to;
  if (args.from < 0 || args.from > to || to > data.num_users)
    throw DataError("user range [" + std::to_string(args.from) + ", " +
                    std::to_string(to) + ") out of bounds for " +
                    std::to_string(data.num_users) + " users");

  SimilarityMatrix S;
  if (kind == SimilarityKind::diffusion)
    S = diffusion_similarity(build_channel_graph(data),
                             resolve_threads(args.threads));
  else
    S = pearson_similarity(
        data, {PearsonMeans::common_support, resolve_threads(args.threads)});

  auto dump = [&](std::ostream& out) {
    dump_similarity_csv(S, static_cast<std::uint32_t>(args.from),
                        static_cast<std::uint32_t>(to), out);
  };
  if (args.out_file.empty())
    dump(std::cout);
  else
    write_file(args.out_file, dump);
  return 0;
}

struct SynthArgs {
  SyntheticParams params;
  std::string out_file;
};

int cmd_gen_synth(const SynthArgs& args) {
  const RatingsDataset data = generate_synthetic(args.params);
  save_canonical_csv(data, args.out_file);
  const DatasetStats stats = dataset_stats(data);
  std::printf("wrote %zu ratings (%u users, %u items) to %s\n",
              stats.num_ratings, stats.num_users, stats.num_items,
              args.out_file.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collaborative filtering benchmark: multi-channel diffusion "
               "similarity vs. Pearson correlation"};
  app.require_subcommand(1);

  DatasetArgs stats_args;
  CLI::App* stats_cmd = app.add_subcommand("stats", "print dataset summary");
  add_dataset_options(stats_cmd, stats_args);

  ExperimentArgs run_args;
  CLI::App* run_cmd = app.add_subcommand(
      "run", "evaluate methods on train/probe splits and write reports");
  add_experiment_options(run_cmd, run_args);
  run_cmd->add_option("--p", run_args.p_values,
                      "probe percentages (default 10)")
      ->delimiter(',')
      ->check(CLI::Range(10, 90));

  ExperimentArgs sweep_args;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "density sweep over p = 10..90 (override with --p)");
  add_experiment_options(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--p", sweep_args.p_values, "probe percentages")
      ->delimiter(',')
      ->check(CLI::Range(10, 90));

  DumpArgs dump_args;
  CLI::App* dump_cmd = app.add_subcommand(
      "dump-sim", "write similarity entries for a source user range");
  add_dataset_options(dump_cmd, dump_args.data);
  dump_cmd->add_option("--method", dump_args.method, "similarity method")
      ->check(CLI::IsMember({"diffusion", "pearson"}))
      ->capture_default_str();
  dump_cmd->add_option("--from", dump_args.from, "first source user");
  dump_cmd->add_option("--to", dump_args.to, "one past the last source user");
  dump_cmd->add_option("--out", dump_args.out_file, "output file (default stdout)");
  dump_cmd->add_option("--threads", dump_args.threads, "worker threads");

  SynthArgs synth_args;
  CLI::App* synth_cmd = app.add_subcommand(
      "gen-synth", "generate a synthetic dataset in canonical CSV form");
  synth_cmd->add_option("--users", synth_args.params.num_users)->required();
  synth_cmd->add_option("--items", synth_args.params.num_items)->required();
  synth_cmd->add_option("--density", synth_args.params.density)->required();
  synth_cmd->add_option("--scale", synth_args.params.scale_max)
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth_args.params.seed)
      ->capture_default_str();
  synth_cmd->add_option("--user-bias", synth_args.params.user_bias_spread)
      ->capture_default_str();
  synth_cmd->add_option("--item-bias", synth_args.params.item_bias_spread)
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth_args.params.noise)
      ->capture_default_str();
  synth_cmd->add_option("--out", synth_args.out_file, "output CSV path")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*stats_cmd) return cmd_stats(stats_args);
    if (*run_cmd)
      return run_experiments(
          run_args, run_args.p_values.empty() ? std::vector<int>{10}
                                              : run_args.p_values);
    if (*sweep_cmd) {
      std::vector<int> p_values = sweep_args.p_values;
      if (p_values.empty())
        for (int p = 10; p <= 90; p += 10) p_values.push_back(p);
      return run_experiments(sweep_args, p_values);
    }
    if (*dump_cmd) return cmd_dump_similarity(dump_args);
    if (*synth_cmd) return cmd_gen_synth(synth_args);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const InvariantError& e) {
    std::cerr << "internal invariant violated: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}
