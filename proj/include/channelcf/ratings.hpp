#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace channelcf {

struct Rating {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  int value = 0;  // discrete level in 1..scale_max

  friend bool operator==(const Rating&, const Rating&) = default;
};

struct ItemRating {
  std::uint32_t item = 0;
  int value = 0;
};

struct UserRating {
  std::uint32_t user = 0;
  int value = 0;
};

// Immutable rating table with CSR-style index structures by user and by
// item. Build through make_dataset(), which validates the invariants
// (levels in 1..scale_max, ids in range, no duplicate (user, item) pair).
struct RatingsDataset {
  std::uint32_t num_users = 0;
  std::uint32_t num_items = 0;
  int scale_max = 0;
  std::vector<Rating> triples;

  std::vector<std::size_t> user_offsets;  // num_users + 1
  std::vector<ItemRating> user_items;     // per user, sorted by item
  std::vector<std::size_t> item_offsets;  // num_items + 1
  std::vector<UserRating> item_users;     // per item, sorted by user

  // External id tokens from ingestion; empty when ids are native.
  std::vector<std::string> user_labels;
  std::vector<std::string> item_labels;

  std::size_t size() const { return triples.size(); }

  std::span<const ItemRating> items_of(std::uint32_t user) const {
    return {user_items.data() + user_offsets[user],
            user_offsets[user + 1] - user_offsets[user]};
  }

  std::span<const UserRating> voters_of(std::uint32_t item) const {
    return {item_users.data() + item_offsets[item],
            item_offsets[item + 1] - item_offsets[item]};
  }

  std::size_t user_count_of(std::uint32_t user) const {
    return user_offsets[user + 1] - user_offsets[user];
  }
};

// Validates and indexes. Throws DataError on any invariant violation.
RatingsDataset make_dataset(std::uint32_t num_users, std::uint32_t num_items,
                            int scale_max, std::vector<Rating> triples);

// Train/probe partition of a dataset. probe holds p% of the source triples
// (round half up), train the rest. Ids keep the source numbering, so users
// or items may end up with no training ratings.
struct Split {
  RatingsDataset train;
  std::vector<Rating> probe;
  int p = 0;
  std::uint64_t seed = 0;
  int run_index = 0;
};

// Uniform sample without replacement, deterministic for fixed
// (seed, run_index). Requires 10 <= p <= 90 and a non-empty source.
Split split_dataset(const RatingsDataset& source, int p, std::uint64_t seed,
                    int run_index);

// Probe size used by split_dataset: round half up of p/100 * n.
std::size_t probe_size_for(std::size_t num_triples, int p);

// Per-user mean ratings over a training set. Users without training
// ratings have no entry; callers fall back to the global mean.
struct UserMeans {
  std::vector<double> mean;         // valid where count > 0
  std::vector<std::uint32_t> count;
  double global_mean = 0.0;

  bool has(std::uint32_t user) const { return count[user] > 0; }
  double of(std::uint32_t user) const { return mean[user]; }
  double or_global(std::uint32_t user) const {
    return count[user] > 0 ? mean[user] : global_mean;
  }
};

// Throws DataError when train has no triples (the global mean would be
// undefined).
UserMeans compute_user_means(const RatingsDataset& train);

struct DatasetStats {
  std::uint32_t num_users = 0;
  std::uint32_t num_items = 0;
  std::size_t num_ratings = 0;
  double density = 0.0;                 // |triples| / (m * n)
  std::vector<std::size_t> histogram;   // histogram[r] = count of level r, 1-based
};

DatasetStats dataset_stats(const RatingsDataset& d);

}  // namespace channelcf
