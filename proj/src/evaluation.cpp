#include "channelcf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "channelcf/channel_graph.hpp"
#include "channelcf/errors.hpp"
#include "channelcf/rng.hpp"

namespace channelcf {

namespace {

void check_aligned(std::span<const Prediction> predictions,
                   std::span<const Rating> probe) {
  if (probe.empty())
    throw InvariantError("metrics are undefined on an empty probe");
  if (predictions.size() != probe.size())
    throw InvariantError("predictions and probe are not aligned");
  for (std::size_t i = 0; i < probe.size(); ++i) {
    if (predictions[i].user != probe[i].user ||
        predictions[i].item != probe[i].item)
      throw InvariantError("predictions and probe disagree at position " +
                           std::to_string(i));
  }
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

double mae(std::span<const Prediction> predictions,
           std::span<const Rating> probe) {
  check_aligned(predictions, probe);
  double sum = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i)
    sum += std::abs(probe[i].value - predictions[i].value);
  return sum / static_cast<double>(probe.size());
}

double rmse(std::span<const Prediction> predictions,
            std::span<const Rating> probe) {
  check_aligned(predictions, probe);
  double sum = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double r = probe[i].value - predictions[i].value;
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(probe.size()));
}

MetricPair compute_metrics(std::span<const Prediction> predictions,
                           std::span<const Rating> probe) {
  MetricPair m;
  m.mae = mae(predictions, probe);
  m.rmse = rmse(predictions, probe);
  m.probe_size = probe.size();
  std::size_t fallbacks = 0;
  for (const Prediction& p : predictions)
    if (p.fallback != Fallback::none) ++fallbacks;
  m.fallback_fraction =
      static_cast<double>(fallbacks) / static_cast<double>(probe.size());
  return m;
}

std::vector<RunSpec> default_runs() {
  std::vector<RunSpec> runs;
  for (int i = 0; i < 5; ++i)
    runs.push_back({static_cast<std::uint64_t>(i + 1), i});
  return runs;
}

std::string describe_options(const ExperimentOptions& options,
                             std::span<const RunSpec> runs) {
  std::ostringstream out;
  out << "clamp=" << (options.predict.clamp ? "on" : "off")
      << " strict_kappa=" << (options.predict.strict_kappa ? "on" : "off")
      << " top_k=" << options.predict.top_k
      << " pearson_means=" << to_string(options.pearson_means) << " runs=[";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (i) out << ' ';
    out << runs[i].seed << ':' << runs[i].run_index;
  }
  out << "] rng=" << kRngIdentity;
  return out.str();
}

MetricPair evaluate_run(const RatingsDataset& data, SimilarityKind method,
                        int p, const RunSpec& run,
                        const ExperimentOptions& options) {
  const Split split = split_dataset(data, p, run.seed, run.run_index);
  const UserMeans means = compute_user_means(split.train);
  SimilarityMatrix S;
  if (method == SimilarityKind::diffusion) {
    const ChannelGraph graph = build_channel_graph(split.train);
    S = diffusion_similarity(graph, options.threads);
  } else {
    S = pearson_similarity(split.train,
                           {options.pearson_means, options.threads});
  }
  const std::vector<Prediction> predictions =
      predict_probe(split, S, means, options.predict, options.threads);
  return compute_metrics(predictions, split.probe);
}

EvaluationReport run_experiment(const RatingsDataset& data,
                                const std::string& dataset_tag,
                                SimilarityKind method, int p,
                                std::span<const RunSpec> runs,
                                const ExperimentOptions& options) {
  if (runs.empty())
    throw std::invalid_argument("run_experiment needs at least one run");
  EvaluationReport report;
  report.dataset = dataset_tag;
  report.method = method;
  report.p = p;
  report.config = describe_options(options, runs);

  for (const RunSpec& run : runs) {
    try {
      report.per_run.push_back({run, evaluate_run(data, method, p, run, options)});
    } catch (const DataError& e) {
      throw DataError("run " + std::to_string(run.run_index) + " (seed " +
                      std::to_string(run.seed) + ", method " +
                      std::string(to_string(method)) + ", p=" +
                      std::to_string(p) + "): " + e.what());
    }
  }

  MetricPair& mean = report.mean;
  for (const RunResult& r : report.per_run) {
    mean.mae += r.metrics.mae;
    mean.rmse += r.metrics.rmse;
    mean.fallback_fraction += r.metrics.fallback_fraction;
  }
  const auto n = static_cast<double>(report.per_run.size());
  mean.mae /= n;
  mean.rmse /= n;
  mean.fallback_fraction /= n;
  // probe sizes are identical across runs of one cell by construction
  mean.probe_size = report.per_run.front().metrics.probe_size;
  return report;
}

std::vector<EvaluationReport> density_sweep(
    const RatingsDataset& data, const std::string& dataset_tag,
    std::span<const SimilarityKind> methods, std::span<const int> p_values,
    std::span<const RunSpec> runs, const ExperimentOptions& options) {
  std::vector<EvaluationReport> reports;
  reports.reserve(methods.size() * p_values.size());
  for (SimilarityKind method : methods)
    for (int p : p_values)
      reports.push_back(
          run_experiment(data, dataset_tag, method, p, runs, options));
  return reports;
}

void write_report_csv(std::span<const EvaluationReport> reports,
                      std::ostream& out) {
  if (!reports.empty()) out << "# config: " << reports.front().config << '\n';
  out << "dataset,method,p,run,seed,probe_size,mae,rmse,fallback_fraction\n";
  for (const EvaluationReport& report : reports) {
    for (const RunResult& r : report.per_run) {
      out << report.dataset << ',' << to_string(report.method) << ','
          << report.p << ',' << r.run.run_index << ',' << r.run.seed << ','
          << r.metrics.probe_size << ',' << format_double(r.metrics.mae)
          << ',' << format_double(r.metrics.rmse) << ','
          << format_double(r.metrics.fallback_fraction) << '\n';
    }
    out << report.dataset << ',' << to_string(report.method) << ','
        << report.p << ",mean,," << report.mean.probe_size << ','
        << format_double(report.mean.mae) << ','
        << format_double(report.mean.rmse) << ','
        << format_double(report.mean.fallback_fraction) << '\n';
  }
}

void write_wide_csv(std::span<const EvaluationReport> reports,
                    std::ostream& out) {
  if (!reports.empty()) out << "# config: " << reports.front().config << '\n';

  std::vector<SimilarityKind> methods;
  std::vector<int> p_values;
  for (const EvaluationReport& r : reports) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);
    if (std::find(p_values.begin(), p_values.end(), r.p) == p_values.end())
      p_values.push_back(r.p);
  }
  std::sort(p_values.begin(), p_values.end());

  out << 'p';
  for (SimilarityKind m : methods)
    out << ',' << to_string(m) << "_mae," << to_string(m) << "_rmse";
  out << '\n';
  for (int p : p_values) {
    out << p;
    for (SimilarityKind m : methods) {
      auto it = std::find_if(reports.begin(), reports.end(),
                             [&](const EvaluationReport& r) {
                               return r.method == m && r.p == p;
                             });
      if (it == reports.end())
        out << ",,";
      else
        out << ',' << format_double(it->mean.mae) << ','
            << format_double(it->mean.rmse);
    }
    out << '\n';
  }
}

}  // namespace channelcf
