#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "channelcf/predictor.hpp"
#include "channelcf/ratings.hpp"
#include "channelcf/similarity.hpp"

namespace channelcf {

struct MetricPair {
  double mae = 0.0;
  double rmse = 0.0;
  std::size_t probe_size = 0;
  double fallback_fraction = 0.0;
};

// Mean absolute error over aligned predictions/probe. Rejects empty or
// misaligned input.
double mae(std::span<const Prediction> predictions,
           std::span<const Rating> probe);

// Root mean square error, same contract as mae().
double rmse(std::span<const Prediction> predictions,
            std::span<const Rating> probe);

MetricPair compute_metrics(std::span<const Prediction> predictions,
                           std::span<const Rating> probe);

struct RunSpec {
  std::uint64_t seed = 0;
  int run_index = 0;
};

// Five runs with seeds 1..5, run indices 0..4.
std::vector<RunSpec> default_runs();

struct ExperimentOptions {
  PredictOptions predict;
  PearsonMeans pearson_means = PearsonMeans::common_support;
  int threads = 1;
};

struct RunResult {
  RunSpec run;
  MetricPair metrics;
};

struct EvaluationReport {
  std::string dataset;
  SimilarityKind method = SimilarityKind::diffusion;
  int p = 0;
  std::vector<RunResult> per_run;
  MetricPair mean;     // arithmetic mean over runs, field by field
  std::string config;  // resolved option snapshot embedded in reports
};

// Deterministic serialization of the resolved options; thread count is
// execution detail and deliberately left out so reports are byte-stable
// across worker counts.
std::string describe_options(const ExperimentOptions& options,
                             std::span<const RunSpec> runs);

// One split -> similarity -> prediction -> metrics pass.
MetricPair evaluate_run(const RatingsDataset& data, SimilarityKind method,
                        int p, const RunSpec& run,
                        const ExperimentOptions& options);

// The full protocol for one (method, p) cell: independent splits per run,
// averaged metrics.
EvaluationReport run_experiment(const RatingsDataset& data,
                                const std::string& dataset_tag,
                                SimilarityKind method, int p,
                                std::span<const RunSpec> runs,
                                const ExperimentOptions& options);

// One report per (method, p) pair, p varying fastest within a method.
std::vector<EvaluationReport> density_sweep(
    const RatingsDataset& data, const std::string& dataset_tag,
    std::span<const SimilarityKind> methods, std::span<const int> p_values,
    std::span<const RunSpec> runs, const ExperimentOptions& options);

// Long-form CSV: one row per run plus a mean row per report.
void write_report_csv(std::span<const EvaluationReport> reports,
                      std::ostream& out);

// Wide CSV for plotting: one row per p, mean mae/rmse columns per method.
void write_wide_csv(std::span<const EvaluationReport> reports,
                    std::ostream& out);

}  // namespace channelcf
