#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "channelcf/ratings.hpp"
#include "channelcf/similarity.hpp"

namespace channelcf {

enum class Fallback { none, user_mean, global_mean };

std::string_view to_string(Fallback);

struct Prediction {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  double value = 0.0;
  double kappa = 0.0;               // normalization used; 0 when a fallback fired
  std::uint32_t neighbor_count = 0;  // voters that contributed weight
  Fallback fallback = Fallback::none;
};

struct PredictOptions {
  // Clamp predictions into [1, scale_max]. Off by default: raw values
  // feed the error metrics.
  bool clamp = false;
  // Normalize by the signed weight sum instead of the absolute sum.
  // Identical for nonnegative (diffusion) similarities; with signed
  // correlations the absolute sum is the stable choice, so strict mode
  // is only meant for diffusion experiments.
  bool strict_kappa = false;
  // Keep only the top_k voters by |weight| (0 = all voters).
  std::uint32_t top_k = 0;
};

// Weight sums with magnitude below this are treated as an empty
// neighborhood rather than allowed to blow up the normalization.
inline constexpr double kMinWeightSum = 1e-12;

// Standard neighborhood prediction: the target's mean plus the
// kappa-normalized weighted sum of voter deviations. Voters are the
// training raters of the item, excluding the target, taken in ascending
// user order. No usable voter -> user mean; unknown user -> global mean.
Prediction predict(std::uint32_t user, std::uint32_t item,
                   const RatingsDataset& train, const UserMeans& means,
                   const SimilarityMatrix& S,
                   const PredictOptions& options = {});

// One prediction per probe triple, in probe order.
std::vector<Prediction> predict_probe(const Split& split,
                                      const SimilarityMatrix& S,
                                      const UserMeans& means,
                                      const PredictOptions& options = {},
                                      int threads = 1);

// Prediction dump as CSV "user,item,true,predicted,fallback".
void dump_predictions_csv(std::span<const Prediction> predictions,
                          std::span<const Rating> probe, std::ostream& out);

}  // namespace channelcf
