#include "channelcf/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "channelcf/parallel.hpp"

namespace channelcf {

std::string_view to_string(Fallback f) {
  switch (f) {
    case Fallback::none: return "none";
    case Fallback::user_mean: return "user_mean";
    default: return "global_mean";
  }
}

Prediction predict(std::uint32_t user, std::uint32_t item,
                   const RatingsDataset& train, const UserMeans& means,
                   const SimilarityMatrix& S, const PredictOptions& options) {
  if (user >= train.num_users)
    throw std::invalid_argument("predict: user id out of range");
  if (item >= train.num_items)
    throw std::invalid_argument("predict: item id out of range");

  Prediction pred;
  pred.user = user;
  pred.item = item;

  struct Voter {
    std::uint32_t user;
    double weight;
    double deviation;
  };
  std::vector<Voter> voters;
  for (const UserRating& vr : train.voters_of(item)) {
    if (vr.user == user) continue;  // cannot happen for probe pairs; enforced anyway
    const double w = S.get(user, vr.user);
    if (w == 0.0) continue;
    voters.push_back({vr.user, w, vr.value - means.of(vr.user)});
  }

  if (options.top_k > 0 && voters.size() > options.top_k) {
    std::stable_sort(voters.begin(), voters.end(),
                     [](const Voter& a, const Voter& b) {
                       return std::abs(a.weight) > std::abs(b.weight);
                     });
    voters.resize(options.top_k);
    std::sort(voters.begin(), voters.end(),
              [](const Voter& a, const Voter& b) { return a.user < b.user; });
  }

  double weighted = 0.0, signed_sum = 0.0, abs_sum = 0.0;
  for (const Voter& v : voters) {
    weighted += v.weight * v.deviation;
    signed_sum += v.weight;
    abs_sum += std::abs(v.weight);
  }

  const double denom = options.strict_kappa ? signed_sum : abs_sum;
  if (!voters.empty() && denom > kMinWeightSum) {
    pred.kappa = 1.0 / denom;
    pred.neighbor_count = static_cast<std::uint32_t>(voters.size());
    pred.fallback = Fallback::none;
    pred.value = means.or_global(user) + pred.kappa * weighted;
  } else if (means.has(user)) {
    pred.fallback = Fallback::user_mean;
    pred.value = means.of(user);
  } else {
    pred.fallback = Fallback::global_mean;
    pred.value = means.global_mean;
  }

  if (options.clamp)
    pred.value = std::clamp(pred.value, 1.0,
                            static_cast<double>(train.scale_max));
  return pred;
}

std::vector<Prediction> predict_probe(const Split& split,
                                      const SimilarityMatrix& S,
                                      const UserMeans& means,
                                      const PredictOptions& options,
                                      int threads) {
  if (S.num_users != split.train.num_users)
    throw std::invalid_argument(
        "predict_probe: similarity matrix does not match the training set");
  std::vector<Prediction> predictions(split.probe.size());
  parallel_for(split.probe.size(), threads, [&](std::size_t i) {
    const Rating& r = split.probe[i];
    predictions[i] = predict(r.user, r.item, split.train, means, S, options);
  });
  return predictions;
}

void dump_predictions_csv(std::span<const Prediction> predictions,
                          std::span<const Rating> probe, std::ostream& out) {
  out << "user,item,true,predicted,fallback\n";
  char buf[40];
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const Prediction& p = predictions[i];
    std::snprintf(buf, sizeof buf, "%.17g", p.value);
    out << p.user << ',' << p.item << ',' << probe[i].value << ',' << buf
        << ',' << to_string(p.fallback) << '\n';
  }
}

}  // namespace channelcf
