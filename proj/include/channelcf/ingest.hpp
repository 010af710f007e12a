#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "channelcf/ratings.hpp"

namespace channelcf {

// MovieLens 100k u.data layout: tab-separated
// "user<TAB>item<TAB>rating<TAB>timestamp" with 1-based external ids.
// Timestamps are parsed and discarded. External ids are remapped to dense
// 0-based indices in ascending numeric order; the original tokens are kept
// in user_labels/item_labels. Scale is 1..5.
RatingsDataset load_movielens(const std::filesystem::path& path);

// Writes the MovieLens layout back out (timestamp column emitted as 0).
void save_movielens(const RatingsDataset& d, const std::filesystem::path& path);

// Netflix prize text layout: one or more blocks starting with a
// "<movie_id>:" header line followed by "user_id,rating,YYYY-MM-DD" lines.
// Accepts a single file or a directory of such files (read in sorted name
// order). Scale is 1..5.
RatingsDataset load_netflix(const std::filesystem::path& path);

// Canonical fixture format: CSV "user,item,rating" with 0-based dense ids
// and a mandatory header row.
RatingsDataset load_canonical_csv(const std::filesystem::path& path,
                                  int scale_max = 5);
void save_canonical_csv(const RatingsDataset& d,
                        const std::filesystem::path& path);

struct SubsampleParams {
  std::uint32_t target_users = 0;
  std::uint32_t target_items = 0;
  std::uint32_t min_user_degree = 0;  // within the retained item set
  std::uint32_t min_item_degree = 0;  // within the retained user set
  std::uint64_t seed = 1;
  int max_rounds = 500;
};

// Degree-constrained random subsample: picks random candidate users and
// items, then alternately drops degree violators and replenishes from the
// source until the subgraph is stable with exactly the target counts.
// Throws DataError describing the best round achieved when the budget runs
// out. Constraints are evaluated on the final subgraph.
RatingsDataset subsample(const RatingsDataset& source,
                         const SubsampleParams& params);

struct SyntheticParams {
  std::uint32_t num_users = 0;
  std::uint32_t num_items = 0;
  double density = 0.0;  // in (0, 1]
  int scale_max = 5;
  std::uint64_t seed = 1;
  double user_bias_spread = 1.0;
  double item_bias_spread = 1.0;
  double noise = 0.75;
};

// Rating generator with planted user/item structure: each rating is the
// scale midpoint plus a per-user bias, a per-item bias and uniform noise,
// rounded and clamped into 1..scale_max. Exactly
// round(density * users * items) distinct cells, deterministic per seed.
RatingsDataset generate_synthetic(const SyntheticParams& params);

}  // namespace channelcf
