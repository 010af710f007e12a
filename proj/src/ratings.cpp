#include "channelcf/ratings.hpp"

#include <algorithm>
#include <numeric>

#include "channelcf/errors.hpp"
#include "channelcf/rng.hpp"

namespace channelcf {

RatingsDataset make_dataset(std::uint32_t num_users, std::uint32_t num_items,
                            int scale_max, std::vector<Rating> triples) {
  if (scale_max < 1) throw DataError("scale_max must be >= 1");
  RatingsDataset d;
  d.num_users = num_users;
  d.num_items = num_items;
  d.scale_max = scale_max;
  d.triples = std::move(triples);

  d.user_offsets.assign(num_users + 1, 0);
  d.item_offsets.assign(num_items + 1, 0);
  for (const Rating& r : d.triples) {
    if (r.user >= num_users)
      throw DataError("user id " + std::to_string(r.user) + " out of range (" +
                      std::to_string(num_users) + " users)");
    if (r.item >= num_items)
      throw DataError("item id " + std::to_string(r.item) + " out of range (" +
                      std::to_string(num_items) + " items)");
    if (r.value < 1 || r.value > scale_max)
      throw DataError("rating " + std::to_string(r.value) + " for user " +
                      std::to_string(r.user) + ", item " +
                      std::to_string(r.item) + " outside 1.." +
                      std::to_string(scale_max));
    ++d.user_offsets[r.user + 1];
    ++d.item_offsets[r.item + 1];
  }
  std::partial_sum(d.user_offsets.begin(), d.user_offsets.end(),
                   d.user_offsets.begin());
  std::partial_sum(d.item_offsets.begin(), d.item_offsets.end(),
                   d.item_offsets.begin());

  d.user_items.resize(d.triples.size());
  d.item_users.resize(d.triples.size());
  std::vector<std::size_t> ucur(d.user_offsets.begin(),
                                d.user_offsets.end() - 1);
  std::vector<std::size_t> icur(d.item_offsets.begin(),
                                d.item_offsets.end() - 1);
  for (const Rating& r : d.triples) {
    d.user_items[ucur[r.user]++] = {r.item, r.value};
    d.item_users[icur[r.item]++] = {r.user, r.value};
  }
  for (std::uint32_t u = 0; u < num_users; ++u) {
    auto begin = d.user_items.begin() + d.user_offsets[u];
    auto end = d.user_items.begin() + d.user_offsets[u + 1];
    std::sort(begin, end,
              [](const ItemRating& a, const ItemRating& b) { return a.item < b.item; });
    for (auto it = begin; it != end; ++it) {
      if (it != begin && it->item == (it - 1)->item)
        throw DataError("duplicate rating for user " + std::to_string(u) +
                        ", item " + std::to_string(it->item));
    }
  }
  for (std::uint32_t i = 0; i < num_items; ++i) {
    auto begin = d.item_users.begin() + d.item_offsets[i];
    auto end = d.item_users.begin() + d.item_offsets[i + 1];
    std::sort(begin, end,
              [](const UserRating& a, const UserRating& b) { return a.user < b.user; });
  }
  return d;
}

std::size_t probe_size_for(std::size_t num_triples, int p) {
  // round half up of p/100 * n, computed exactly in integers
  return (static_cast<std::size_t>(p) * num_triples + 50) / 100;
}

Split split_dataset(const RatingsDataset& source, int p, std::uint64_t seed,
                    int run_index) {
  if (source.triples.empty()) throw DataError("cannot split an empty dataset");
  if (p < 10 || p > 90)
    throw DataError("p must lie in 10..90, got " + std::to_string(p));

  const std::size_t n = source.triples.size();
  const std::size_t probe_size = probe_size_for(n, p);

  std::vector<std::uint32_t> index(n);
  std::iota(index.begin(), index.end(), 0);
  Rng rng(seed, static_cast<std::uint64_t>(run_index));
  // partial Fisher-Yates: the first probe_size slots become the probe
  for (std::size_t i = 0; i < probe_size; ++i) {
    const std::size_t j = i + rng.bounded(n - i);
    std::swap(index[i], index[j]);
  }

  std::vector<bool> in_probe(n, false);
  for (std::size_t i = 0; i < probe_size; ++i) in_probe[index[i]] = true;

  Split split;
  split.p = p;
  split.seed = seed;
  split.run_index = run_index;
  split.probe.reserve(probe_size);
  std::vector<Rating> train_triples;
  train_triples.reserve(n - probe_size);
  for (std::size_t i = 0; i < n; ++i) {
    if (in_probe[i])
      split.probe.push_back(source.triples[i]);
    else
      train_triples.push_back(source.triples[i]);
  }
  split.train = make_dataset(source.num_users, source.num_items,
                             source.scale_max, std::move(train_triples));
  split.train.user_labels = source.user_labels;
  split.train.item_labels = source.item_labels;
  return split;
}

UserMeans compute_user_means(const RatingsDataset& train) {
  if (train.triples.empty())
    throw DataError("cannot compute user means on an empty training set");
  UserMeans means;
  means.mean.assign(train.num_users, 0.0);
  means.count.assign(train.num_users, 0);
  std::vector<std::int64_t> sums(train.num_users, 0);
  std::int64_t total = 0;
  for (const Rating& r : train.triples) {
    sums[r.user] += r.value;
    ++means.count[r.user];
    total += r.value;
  }
  for (std::uint32_t u = 0; u < train.num_users; ++u) {
    if (means.count[u] > 0)
      means.mean[u] = static_cast<double>(sums[u]) / means.count[u];
  }
  means.global_mean =
      static_cast<double>(total) / static_cast<double>(train.triples.size());
  return means;
}

DatasetStats dataset_stats(const RatingsDataset& d) {
  DatasetStats s;
  s.num_users = d.num_users;
  s.num_items = d.num_items;
  s.num_ratings = d.triples.size();
  const double cells =
      static_cast<double>(d.num_users) * static_cast<double>(d.num_items);
  s.density = cells > 0 ? static_cast<double>(s.num_ratings) / cells : 0.0;
  s.histogram.assign(static_cast<std::size_t>(d.scale_max) + 1, 0);
  for (const Rating& r : d.triples) ++s.histogram[r.value];
  return s;
}

}  // namespace channelcf
