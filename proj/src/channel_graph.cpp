#include "channelcf/channel_graph.hpp"

#include <algorithm>
#include <ostream>

#include "channelcf/errors.hpp"

namespace channelcf {

ChannelGraph build_channel_graph(const RatingsDataset& train) {
  if (train.triples.empty())
    throw DataError("cannot build a channel graph from an empty training set");

  ChannelGraph g;
  g.num_users = train.num_users;
  g.num_edges = train.triples.size();

  g.channels.reserve(train.triples.size());
  for (const Rating& r : train.triples) g.channels.push_back({r.item, r.value});
  std::sort(g.channels.begin(), g.channels.end());
  g.channels.erase(std::unique(g.channels.begin(), g.channels.end()),
                   g.channels.end());

  auto channel_index = [&](const ChannelKey& key) -> std::uint32_t {
    auto it = std::lower_bound(g.channels.begin(), g.channels.end(), key);
    return static_cast<std::uint32_t>(it - g.channels.begin());
  };

  g.channel_adj.resize(g.channels.size());
  for (std::uint32_t u = 0; u < train.num_users; ++u) {
    auto items = train.items_of(u);
    if (items.empty()) continue;
    auto& adj = g.user_adj[u];
    adj.reserve(items.size());
    // items_of is sorted by item and items are unique per user, so the
    // produced channel indices are already ascending
    for (const ItemRating& ir : items) {
      const std::uint32_t c = channel_index({ir.item, ir.value});
      adj.push_back(c);
      g.channel_adj[c].push_back(u);
    }
  }
  return g;
}

ConsistencyReport graph_consistency_check(const ChannelGraph& g) {
  auto fail = [](std::string msg) { return ConsistencyReport{false, std::move(msg)}; };

  std::size_t user_edge_sum = 0;
  for (const auto& [user, channels] : g.user_adj) {
    if (user >= g.num_users)
      return fail("user " + std::to_string(user) + " out of range");
    if (channels.empty())
      return fail("user " + std::to_string(user) +
                  " stored with empty adjacency (isolated users must not be stored)");
    if (!std::is_sorted(channels.begin(), channels.end()) ||
        std::adjacent_find(channels.begin(), channels.end()) != channels.end())
      return fail("adjacency of user " + std::to_string(user) +
                  " is not strictly ascending");
    user_edge_sum += channels.size();
    for (std::uint32_t c : channels) {
      if (c >= g.channels.size())
        return fail("channel index " + std::to_string(c) + " out of range");
      const auto& users = g.channel_adj[c];
      if (!std::binary_search(users.begin(), users.end(), user))
        return fail("edge (user " + std::to_string(user) + ", channel " +
                    std::to_string(c) + ") missing from channel adjacency");
    }
  }

  if (!std::is_sorted(g.channels.begin(), g.channels.end()) ||
      std::adjacent_find(g.channels.begin(), g.channels.end()) != g.channels.end())
    return fail("channel index is not sorted unique by (item, level)");
  if (g.channel_adj.size() != g.channels.size())
    return fail("channel adjacency size does not match channel count");

  std::size_t channel_edge_sum = 0;
  for (std::size_t c = 0; c < g.channel_adj.size(); ++c) {
    const auto& users = g.channel_adj[c];
    if (users.empty())
      return fail("channel " + std::to_string(c) + " has degree 0");
    if (!std::is_sorted(users.begin(), users.end()) ||
        std::adjacent_find(users.begin(), users.end()) != users.end())
      return fail("adjacency of channel " + std::to_string(c) +
                  " is not strictly ascending");
    channel_edge_sum += users.size();
    for (std::uint32_t u : users) {
      auto it = g.user_adj.find(u);
      if (it == g.user_adj.end() ||
          !std::binary_search(it->second.begin(), it->second.end(),
                              static_cast<std::uint32_t>(c)))
        return fail("edge (user " + std::to_string(u) + ", channel " +
                    std::to_string(c) + ") missing from user adjacency");
    }
  }

  if (user_edge_sum != g.num_edges || channel_edge_sum != g.num_edges)
    return fail("degree sums (" + std::to_string(user_edge_sum) + ", " +
                std::to_string(channel_edge_sum) + ") do not match edge count " +
                std::to_string(g.num_edges));
  return {};
}

void export_edges_csv(const ChannelGraph& g, std::ostream& out) {
  out << "user,item,level\n";
  for (const auto& [user, channels] : g.user_adj) {
    for (std::uint32_t c : channels) {
      const ChannelKey& key = g.channels[c];
      out << user << ',' << key.item << ',' << key.level << '\n';
    }
  }
}

}  // namespace channelcf
