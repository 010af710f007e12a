#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "channelcf/channel_graph.hpp"
#include "channelcf/ratings.hpp"

namespace channelcf {

enum class SimilarityKind { diffusion, pearson };

std::string_view to_string(SimilarityKind kind);
SimilarityKind similarity_kind_from(std::string_view name);

struct SimEntry {
  std::uint32_t user = 0;
  double score = 0.0;
};

// Sparse user-user similarity, stored column-major: columns[v] holds the
// scores s_uv of resource flowing from source user v, sorted by u. Absent
// entries are zero. Diffusion columns of non-isolated sources sum to 1
// (conservation); Pearson entries are symmetric and lie in [-1, 1].
// Diagonals are stored but prediction never consumes them.
struct SimilarityMatrix {
  SimilarityKind method = SimilarityKind::diffusion;
  std::uint32_t num_users = 0;
  bool symmetric = false;
  std::vector<std::vector<SimEntry>> columns;

  double get(std::uint32_t u, std::uint32_t v) const;
  std::span<const SimEntry> column(std::uint32_t v) const {
    return columns[v];
  }
  std::size_t entry_count() const;
};

// Resource held by each channel after a source user spreads one unit
// evenly over their channels: 1/k(v) on each, zero elsewhere.
struct ResourceVector {
  std::vector<std::pair<std::uint32_t, double>> per_channel;  // sorted by channel
};

// First spreading step. An isolated user yields an empty vector.
ResourceVector diffuse_from_user(const ChannelGraph& g, std::uint32_t v);

// Both spreading steps for one source user: each channel holding resource
// passes it on evenly to its users, giving s_uv = (1/k(v)) * sum over
// shared channels of 1/k(c). Only users sharing a channel with v appear.
std::vector<SimEntry> diffusion_similarity_column(const ChannelGraph& g,
                                                  std::uint32_t v);

// All columns. Asymmetric in general: a heavily-rating source spreads its
// unit of resource more thinly.
SimilarityMatrix diffusion_similarity(const ChannelGraph& g, int threads = 1);

// Convention for the user means inside the correlation. common_support
// (default) recomputes both means over the items the pair co-rated;
// global_training uses each user's full training mean.
enum class PearsonMeans { common_support, global_training };

std::string_view to_string(PearsonMeans);

struct PearsonOptions {
  PearsonMeans means = PearsonMeans::common_support;
  int threads = 1;
};

// Correlation over co-rated items. Pairs with fewer than two common items
// or zero variance on them score 0 (left unstored). Exactly symmetric:
// each pair is computed once and mirrored.
SimilarityMatrix pearson_similarity(const RatingsDataset& train,
                                    const PearsonOptions& options = {});

// Similarity dump as CSV "u,v,score" sorted by (v, u), for diffing
// against external oracles. Sources restricted to [from, to).
void dump_similarity_csv(const SimilarityMatrix& S, std::uint32_t from,
                         std::uint32_t to, std::ostream& out);

}  // namespace channelcf
