#include "channelcf/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "channelcf/errors.hpp"
#include "channelcf/parallel.hpp"

namespace channelcf {

std::string_view to_string(SimilarityKind kind) {
  return kind == SimilarityKind::diffusion ? "diffusion" : "pearson";
}

SimilarityKind similarity_kind_from(std::string_view name) {
  if (name == "diffusion") return SimilarityKind::diffusion;
  if (name == "pearson") return SimilarityKind::pearson;
  throw DataError("unknown similarity method '" + std::string(name) +
                  "' (expected diffusion or pearson)");
}

std::string_view to_string(PearsonMeans means) {
  return means == PearsonMeans::common_support ? "common_support"
                                               : "global_training";
}

double SimilarityMatrix::get(std::uint32_t u, std::uint32_t v) const {
  const auto& col = columns[v];
  auto it = std::lower_bound(
      col.begin(), col.end(), u,
      [](const SimEntry& e, std::uint32_t user) { return e.user < user; });
  return (it != col.end() && it->user == u) ? it->score : 0.0;
}

std::size_t SimilarityMatrix::entry_count() const {
  std::size_t n = 0;
  for (const auto& col : columns) n += col.size();
  return n;
}

ResourceVector diffuse_from_user(const ChannelGraph& g, std::uint32_t v) {
  ResourceVector rv;
  auto it = g.user_adj.find(v);
  if (it == g.user_adj.end()) return rv;
  const auto& channels = it->second;
  const double share = 1.0 / static_cast<double>(channels.size());
  rv.per_channel.reserve(channels.size());
  for (std::uint32_t c : channels) rv.per_channel.emplace_back(c, share);
  return rv;
}

std::vector<SimEntry> diffusion_similarity_column(const ChannelGraph& g,
                                                  std::uint32_t v) {
  std::vector<SimEntry> column;
  auto it = g.user_adj.find(v);
  if (it == g.user_adj.end()) return column;  // isolated source: zero column
  const auto& channels = it->second;
  const double inv_kv = 1.0 / static_cast<double>(channels.size());

  // dense per-column scratch; accumulation order (channels ascending,
  // users within a channel ascending) is fixed so results are bitwise
  // reproducible for any worker count
  std::vector<double> scratch(g.num_users, 0.0);
  std::vector<std::uint32_t> touched;
  for (std::uint32_t c : channels) {
    const auto& users = g.channel_adj[c];
    const double share = inv_kv / static_cast<double>(users.size());
    for (std::uint32_t u : users) {
      if (scratch[u] == 0.0) touched.push_back(u);
      scratch[u] += share;
    }
  }
  std::sort(touched.begin(), touched.end());
  column.reserve(touched.size());
  for (std::uint32_t u : touched) column.push_back({u, scratch[u]});
  return column;
}

SimilarityMatrix diffusion_similarity(const ChannelGraph& g, int threads) {
  SimilarityMatrix S;
  S.method = SimilarityKind::diffusion;
  S.num_users = g.num_users;
  S.symmetric = false;
  S.columns.resize(g.num_users);
  parallel_for(g.num_users, threads, [&](std::size_t v) {
    S.columns[v] =
        diffusion_similarity_column(g, static_cast<std::uint32_t>(v));
  });
  return S;
}

namespace {

// Per-pair accumulator sums over the common item set. Ratings are small
// integers, so int64 sums are exact and zero-variance detection is exact.
struct PairSums {
  std::int64_t n = 0;
  std::int64_t su = 0, sv = 0;
  std::int64_t suu = 0, svv = 0, suv = 0;
};

double pearson_from_sums(const PairSums& s) {
  if (s.n < 2) return 0.0;
  const double var_u = static_cast<double>(s.n * s.suu - s.su * s.su);
  const double var_v = static_cast<double>(s.n * s.svv - s.sv * s.sv);
  if (var_u <= 0.0 || var_v <= 0.0) return 0.0;
  const double cov = static_cast<double>(s.n * s.suv - s.su * s.sv);
  const double r = cov / std::sqrt(var_u * var_v);
  return std::clamp(r, -1.0, 1.0);
}

double pearson_from_sums_global(const PairSums& s, double mean_u,
                                double mean_v) {
  if (s.n < 2) return 0.0;
  const double n = static_cast<double>(s.n);
  const double var_u = static_cast<double>(s.suu) -
                       2.0 * mean_u * static_cast<double>(s.su) +
                       n * mean_u * mean_u;
  const double var_v = static_cast<double>(s.svv) -
                       2.0 * mean_v * static_cast<double>(s.sv) +
                       n * mean_v * mean_v;
  if (var_u <= 0.0 || var_v <= 0.0) return 0.0;
  const double cov = static_cast<double>(s.suv) -
                     mean_v * static_cast<double>(s.su) -
                     mean_u * static_cast<double>(s.sv) + n * mean_u * mean_v;
  const double r = cov / std::sqrt(var_u * var_v);
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace

SimilarityMatrix pearson_similarity(const RatingsDataset& train,
                                    const PearsonOptions& options) {
  SimilarityMatrix S;
  S.method = SimilarityKind::pearson;
  S.num_users = train.num_users;
  S.symmetric = true;
  S.columns.resize(train.num_users);

  UserMeans means;
  if (options.means == PearsonMeans::global_training && !train.triples.empty())
    means = compute_user_means(train);

  // upper[u] holds the scores for partners v > u; one pass per source user
  // over its items' voter lists accumulates every co-rating pair once
  std::vector<std::vector<SimEntry>> upper(train.num_users);
  parallel_for(train.num_users, options.threads, [&](std::size_t ui) {
    const auto u = static_cast<std::uint32_t>(ui);
    auto items = train.items_of(u);
    if (items.empty()) return;

    thread_local std::vector<PairSums> sums;
    thread_local std::vector<std::uint32_t> touched;
    if (sums.size() < train.num_users) sums.resize(train.num_users);
    touched.clear();

    for (const ItemRating& ir : items) {
      const std::int64_t x = ir.value;
      for (const UserRating& vr : train.voters_of(ir.item)) {
        if (vr.user <= u) continue;
        PairSums& ps = sums[vr.user];
        if (ps.n == 0) touched.push_back(vr.user);
        const std::int64_t y = vr.value;
        ++ps.n;
        ps.su += x;
        ps.sv += y;
        ps.suu += x * x;
        ps.svv += y * y;
        ps.suv += x * y;
      }
    }
    std::sort(touched.begin(), touched.end());

    auto& out = upper[u];
    out.reserve(touched.size());
    for (std::uint32_t v : touched) {
      const double score =
          options.means == PearsonMeans::common_support
              ? pearson_from_sums(sums[v])
              : pearson_from_sums_global(sums[v], means.of(u), means.of(v));
      if (score != 0.0) out.push_back({v, score});
      sums[v] = PairSums{};
    }

    // self-correlation: exactly 1 unless the user's ratings have no variance
    PairSums self;
    for (const ItemRating& ir : items) {
      const std::int64_t x = ir.value;
      ++self.n;
      self.su += x;
      self.suu += x * x;
    }
    self.sv = self.su;
    self.svv = self.suu;
    self.suv = self.suu;
    const bool unit = options.means == PearsonMeans::common_support
                          ? (self.n >= 2 && self.n * self.suu - self.su * self.su > 0)
                          : (self.n >= 2 &&
                             pearson_from_sums_global(self, means.of(u), means.of(u)) != 0.0);
    if (unit) out.insert(out.begin(), {u, 1.0});
  });

  // mirror the strict upper triangle; per-column order stays ascending
  for (std::uint32_t u = 0; u < train.num_users; ++u) {
    for (const SimEntry& e : upper[u]) {
      S.columns[u].push_back(e);
      if (e.user != u) S.columns[e.user].push_back({u, e.score});
    }
  }
  return S;
}

void dump_similarity_csv(const SimilarityMatrix& S, std::uint32_t from,
                         std::uint32_t to, std::ostream& out) {
  out << "u,v,score\n";
  char buf[40];
  for (std::uint32_t v = from; v < to; ++v) {
    for (const SimEntry& e : S.columns[v]) {
      std::snprintf(buf, sizeof buf, "%.17g", e.score);
      out << e.user << ',' << v << ',' << buf << '\n';
    }
  }
}

}  // namespace channelcf
