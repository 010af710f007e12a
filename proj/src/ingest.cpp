#include "channelcf/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>

#include "channelcf/errors.hpp"
#include "channelcf/rng.hpp"

namespace channelcf {

namespace {

bool parse_int64(std::string_view text, std::int64_t& out) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

struct RawRecord {
  std::int64_t user = 0;
  std::int64_t item = 0;
  int rating = 0;
};

// Remaps external numeric ids to dense 0-based indices in ascending id
// order and keeps the original tokens as labels.
RatingsDataset assemble(std::vector<RawRecord> records, int scale_max,
                        const std::string& origin) {
  std::vector<std::int64_t> users, items;
  users.reserve(records.size());
  items.reserve(records.size());
  for (const RawRecord& r : records) {
    users.push_back(r.user);
    items.push_back(r.item);
  }
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());

  auto index_of = [](const std::vector<std::int64_t>& ids, std::int64_t id) {
    return static_cast<std::uint32_t>(
        std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  std::vector<Rating> triples;
  triples.reserve(records.size());
  for (const RawRecord& r : records)
    triples.push_back(
        {index_of(users, r.user), index_of(items, r.item), r.rating});

  RatingsDataset d;
  try {
    d = make_dataset(static_cast<std::uint32_t>(users.size()),
                     static_cast<std::uint32_t>(items.size()), scale_max,
                     std::move(triples));
  } catch (const DataError& e) {
    throw DataError(origin + ": " + e.what());
  }
  d.user_labels.reserve(users.size());
  for (std::int64_t id : users) d.user_labels.push_back(std::to_string(id));
  d.item_labels.reserve(items.size());
  for (std::int64_t id : items) d.item_labels.push_back(std::to_string(id));
  return d;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace

RatingsDataset load_movielens(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = strip_cr(line);
    if (text.empty()) continue;
    const auto fields = split(text, '\t');
    if (fields.size() != 3 && fields.size() != 4)
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected user<TAB>item<TAB>rating[<TAB>timestamp], got '" +
                      std::string(text) + "'");
    RawRecord rec;
    std::int64_t rating = 0, timestamp = 0;
    if (!parse_int64(fields[0], rec.user) || !parse_int64(fields[1], rec.item) ||
        !parse_int64(fields[2], rating) ||
        (fields.size() == 4 && !parse_int64(fields[3], timestamp)))
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": malformed line '" + std::string(text) + "'");
    if (rating < 1 || rating > 5)
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": rating " + std::to_string(rating) + " outside 1..5");
    rec.rating = static_cast<int>(rating);
    records.push_back(rec);
  }
  if (records.empty()) throw DataError(path.string() + ": no ratings found");
  return assemble(std::move(records), 5, path.string());
}

void save_movielens(const RatingsDataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const Rating& r : d.triples) {
    if (!d.user_labels.empty())
      out << d.user_labels[r.user];
    else
      out << r.user + 1;
    out << '\t';
    if (!d.item_labels.empty())
      out << d.item_labels[r.item];
    else
      out << r.item + 1;
    out << '\t' << r.value << "\t0\n";
  }
  if (!out) throw DataError("failed writing " + path.string());
}

namespace {

void parse_netflix_file(const std::filesystem::path& path,
                        std::vector<RawRecord>& records) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  std::size_t line_no = 0;
  std::int64_t movie = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = strip_cr(line);
    if (text.empty()) continue;
    if (text.back() == ':') {
      if (!parse_int64(text.substr(0, text.size() - 1), movie))
        throw DataError(path.string() + ":" + std::to_string(line_no) +
                        ": malformed movie header '" + std::string(text) + "'");
      continue;
    }
    if (movie < 0)
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": rating line before any movie header");
    const auto fields = split(text, ',');
    if (fields.size() != 2 && fields.size() != 3)
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected user,rating[,date], got '" +
                      std::string(text) + "'");
    RawRecord rec;
    rec.item = movie;
    std::int64_t rating = 0;
    if (!parse_int64(fields[0], rec.user) || !parse_int64(fields[1], rating))
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": malformed line '" + std::string(text) + "'");
    if (rating < 1 || rating > 5)
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": rating " + std::to_string(rating) + " outside 1..5");
    rec.rating = static_cast<int>(rating);
    records.push_back(rec);
  }
}

}  // namespace

RatingsDataset load_netflix(const std::filesystem::path& path) {
  std::vector<RawRecord> records;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError(path.string() + ": empty directory");
    for (const auto& file : files) parse_netflix_file(file, records);
  } else {
    parse_netflix_file(path, records);
  }
  if (records.empty()) throw DataError(path.string() + ": no ratings found");
  return assemble(std::move(records), 5, path.string());
}

RatingsDataset load_canonical_csv(const std::filesystem::path& path,
                                  int scale_max) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "user,item,rating")
    throw DataError(path.string() + ": missing 'user,item,rating' header row");

  std::vector<Rating> triples;
  std::int64_t max_user = -1, max_item = -1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = strip_cr(line);
    if (text.empty()) continue;
    const auto fields = split(text, ',');
    std::int64_t user = 0, item = 0, rating = 0;
    if (fields.size() != 3 || !parse_int64(fields[0], user) ||
        !parse_int64(fields[1], item) || !parse_int64(fields[2], rating) ||
        user < 0 || item < 0)
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": malformed line '" + std::string(text) + "'");
    if (rating < 1 || rating > scale_max)
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": rating " + std::to_string(rating) + " outside 1.." +
                      std::to_string(scale_max));
    triples.push_back({static_cast<std::uint32_t>(user),
                       static_cast<std::uint32_t>(item),
                       static_cast<int>(rating)});
    max_user = std::max(max_user, user);
    max_item = std::max(max_item, item);
  }
  try {
    return make_dataset(static_cast<std::uint32_t>(max_user + 1),
                        static_cast<std::uint32_t>(max_item + 1), scale_max,
                        std::move(triples));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_canonical_csv(const RatingsDataset& d,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "user,item,rating\n";
  for (const Rating& r : d.triples)
    out << r.user << ',' << r.item << ',' << r.value << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

RatingsDataset subsample(const RatingsDataset& source,
                         const SubsampleParams& params) {
  if (params.target_users == 0 || params.target_items == 0)
    throw DataError("subsample targets must be positive");
  if (params.target_users > source.num_users ||
      params.target_items > source.num_items)
    throw DataError("subsample targets exceed the source dataset (" +
                    std::to_string(source.num_users) + " users, " +
                    std::to_string(source.num_items) + " items)");

  Rng rng(params.seed);
  std::vector<std::uint32_t> user_pool(source.num_users);
  std::iota(user_pool.begin(), user_pool.end(), 0);
  for (std::size_t i = user_pool.size(); i > 1; --i)
    std::swap(user_pool[i - 1], user_pool[rng.bounded(i)]);
  std::vector<std::uint32_t> item_pool(source.num_items);
  std::iota(item_pool.begin(), item_pool.end(), 0);
  for (std::size_t i = item_pool.size(); i > 1; --i)
    std::swap(item_pool[i - 1], item_pool[rng.bounded(i)]);

  std::vector<char> user_active(source.num_users, 0);
  std::vector<char> item_active(source.num_items, 0);
  std::size_t user_cursor = 0, item_cursor = 0;
  std::uint32_t users_active = 0, items_active = 0;

  auto replenish = [&] {
    while (users_active < params.target_users &&
           user_cursor < user_pool.size())
      if (!user_active[user_pool[user_cursor++]]) {
        user_active[user_pool[user_cursor - 1]] = 1;
        ++users_active;
      }
    while (items_active < params.target_items &&
           item_cursor < item_pool.size())
      if (!item_active[item_pool[item_cursor++]]) {
        item_active[item_pool[item_cursor - 1]] = 1;
        ++items_active;
      }
  };
  replenish();

  std::vector<std::uint32_t> user_deg(source.num_users);
  std::vector<std::uint32_t> item_deg(source.num_items);
  std::uint32_t best_users = 0, best_items = 0;

  for (int round = 0; round < params.max_rounds; ++round) {
    if (users_active < params.target_users ||
        items_active < params.target_items)
      break;  // pools exhausted

    std::fill(user_deg.begin(), user_deg.end(), 0);
    std::fill(item_deg.begin(), item_deg.end(), 0);
    for (const Rating& r : source.triples)
      if (user_active[r.user] && item_active[r.item]) {
        ++user_deg[r.user];
        ++item_deg[r.item];
      }

    std::uint32_t ok_users = 0, ok_items = 0;
    for (std::uint32_t u = 0; u < source.num_users; ++u)
      if (user_active[u] && user_deg[u] >= params.min_user_degree) ++ok_users;
    for (std::uint32_t i = 0; i < source.num_items; ++i)
      if (item_active[i] && item_deg[i] >= params.min_item_degree) ++ok_items;
    best_users = std::max(best_users, ok_users);
    best_items = std::max(best_items, ok_items);

    if (ok_users == users_active && ok_items == items_active) {
      std::vector<std::uint32_t> kept_users, kept_items;
      for (std::uint32_t u = 0; u < source.num_users; ++u)
        if (user_active[u]) kept_users.push_back(u);
      for (std::uint32_t i = 0; i < source.num_items; ++i)
        if (item_active[i]) kept_items.push_back(i);

      std::vector<std::uint32_t> user_map(source.num_users, 0);
      std::vector<std::uint32_t> item_map(source.num_items, 0);
      for (std::uint32_t k = 0; k < kept_users.size(); ++k)
        user_map[kept_users[k]] = k;
      for (std::uint32_t k = 0; k < kept_items.size(); ++k)
        item_map[kept_items[k]] = k;

      std::vector<Rating> triples;
      for (const Rating& r : source.triples)
        if (user_active[r.user] && item_active[r.item])
          triples.push_back({user_map[r.user], item_map[r.item], r.value});

      RatingsDataset d = make_dataset(params.target_users, params.target_items,
                                      source.scale_max, std::move(triples));
      for (std::uint32_t u : kept_users)
        d.user_labels.push_back(u < source.user_labels.size()
                                    ? source.user_labels[u]
                                    : std::to_string(u));
      for (std::uint32_t i : kept_items)
        d.item_labels.push_back(i < source.item_labels.size()
                                    ? source.item_labels[i]
                                    : std::to_string(i));
      return d;
    }

    // peel violators, then refill from the shuffled pools
    for (std::uint32_t u = 0; u < source.num_users; ++u)
      if (user_active[u] && user_deg[u] < params.min_user_degree) {
        user_active[u] = 0;
        --users_active;
      }
    for (std::uint32_t i = 0; i < source.num_items; ++i)
      if (item_active[i] && item_deg[i] < params.min_item_degree) {
        item_active[i] = 0;
        --items_active;
      }
    replenish();
  }

  throw DataError(
      "subsample constraints unsatisfiable: best round had " +
      std::to_string(best_users) + "/" + std::to_string(params.target_users) +
      " users with degree >= " + std::to_string(params.min_user_degree) +
      " and " + std::to_string(best_items) + "/" +
      std::to_string(params.target_items) + " items with degree >= " +
      std::to_string(params.min_item_degree));
}

RatingsDataset generate_synthetic(const SyntheticParams& params) {
  if (params.num_users == 0 || params.num_items == 0)
    throw DataError("synthetic dataset needs at least one user and item");
  if (!(params.density > 0.0) || params.density > 1.0)
    throw DataError("synthetic density must lie in (0, 1]");
  if (params.scale_max < 1) throw DataError("scale_max must be >= 1");
  const std::uint64_t cells =
      static_cast<std::uint64_t>(params.num_users) * params.num_items;
  if (cells > 50'000'000)
    throw DataError("synthetic generator supports up to 50M cells");

  const auto count = static_cast<std::uint64_t>(
      std::floor(params.density * static_cast<double>(cells) + 0.5));

  Rng rng(params.seed);
  std::vector<double> user_bias(params.num_users);
  for (auto& b : user_bias) b = rng.symmetric(params.user_bias_spread);
  std::vector<double> item_bias(params.num_items);
  for (auto& b : item_bias) b = rng.symmetric(params.item_bias_spread);

  // partial Fisher-Yates over the cell indices picks `count` distinct cells
  std::vector<std::uint64_t> cell(cells);
  std::iota(cell.begin(), cell.end(), 0);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t j = i + rng.bounded(cells - i);
    std::swap(cell[i], cell[j]);
  }

  const double base = (1.0 + params.scale_max) / 2.0;
  std::vector<Rating> triples;
  triples.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    const auto u = static_cast<std::uint32_t>(cell[k] / params.num_items);
    const auto i = static_cast<std::uint32_t>(cell[k] % params.num_items);
    const double value =
        base + user_bias[u] + item_bias[i] + rng.symmetric(params.noise);
    const auto level = static_cast<int>(std::clamp<long long>(
        std::llround(value), 1, params.scale_max));
    triples.push_back({u, i, level});
  }
  return make_dataset(params.num_users, params.num_items, params.scale_max,
                      std::move(triples));
}

}  // namespace channelcf
