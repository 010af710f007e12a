#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "channelcf/ratings.hpp"

namespace channelcf {

// A channel is one (item, rating level) node: an item on a 5-level scale
// contributes up to five channels, and a user who rated the item is
// adjacent to exactly the channel matching the level they gave.
struct ChannelKey {
  std::uint32_t item = 0;
  int level = 0;

  friend bool operator==(const ChannelKey&, const ChannelKey&) = default;
  friend auto operator<=>(const ChannelKey&, const ChannelKey&) = default;
};

// User-channel bipartite adjacency. Only occupied channels are
// materialized, indexed densely in (item, level) order so downstream
// output is reproducible. Users with no training ratings are not stored
// in user_adj.
struct ChannelGraph {
  std::uint32_t num_users = 0;
  std::vector<ChannelKey> channels;                      // sorted by (item, level)
  std::map<std::uint32_t, std::vector<std::uint32_t>> user_adj;  // user -> sorted channel indices
  std::vector<std::vector<std::uint32_t>> channel_adj;   // channel -> sorted users
  std::size_t num_edges = 0;

  std::size_t user_degree(std::uint32_t user) const {
    auto it = user_adj.find(user);
    return it == user_adj.end() ? 0 : it->second.size();
  }
  std::size_t channel_degree(std::uint32_t channel) const {
    return channel_adj[channel].size();
  }
};

// One edge per training triple; unoccupied channels never materialize.
// Requires a non-empty training set.
ChannelGraph build_channel_graph(const RatingsDataset& train);

struct ConsistencyReport {
  bool ok = true;
  std::string message;  // names the first violated invariant
};

// Re-derives the structural invariants: stored adjacency entries are
// non-empty and sorted, user_adj and channel_adj are exact transposes,
// and degree sums match the edge count.
ConsistencyReport graph_consistency_check(const ChannelGraph& g);

// Debug edge list as CSV lines "user,item,level", sorted by (user, channel).
void export_edges_csv(const ChannelGraph& g, std::ostream& out);

}  // namespace channelcf
