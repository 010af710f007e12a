#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "channelcf/errors.hpp"
#include "channelcf/ingest.hpp"
#include "oracle.hpp"

using namespace channelcf;
namespace fs = std::filesystem;

namespace {

// Unique per-process scratch dir; tests may run concurrently.
fs::path scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() /
                 ("channelcf_ingest_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

fs::path write_text(const std::string& name, const std::string& text) {
  const fs::path path = scratch() / name;
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path;
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("tab-separated ratings load with dense remapped ids") {
  const fs::path path = write_text("basic.data",
                                   "196\t242\t3\t881250949\n"
                                   "186\t302\t3\t891717742\n"
                                   "22\t377\t1\t878887116\n");
  RatingsDataset d = load_movielens(path);
  CHECK(d.num_users == 3);
  CHECK(d.num_items == 3);
  CHECK(d.scale_max == 5);
  CHECK(d.size() == 3);
  // ids are assigned in ascending numeric order of the external tokens
  CHECK(d.user_labels[0] == "22");
  CHECK(d.user_labels[1] == "186");
  CHECK(d.user_labels[2] == "196");
  CHECK(d.item_labels[0] == "242");
  // user 22 rated item 377 with 1
  CHECK(d.items_of(0).size() == 1);
  CHECK(d.items_of(0)[0].value == 1);
}

TEST_CASE("three-column rows without timestamps are accepted") {
  const fs::path path = write_text("three.data", "1\t1\t5\n2\t1\t4\n");
  RatingsDataset d = load_movielens(path);
  CHECK(d.size() == 2);
}

TEST_CASE("loader errors carry the file position") {
  const fs::path bad_fields = write_text("bad_fields.data", "1\t1\t5\n1\t2\n");
  CHECK_THROWS_WITH_AS(load_movielens(bad_fields),
                       doctest::Contains("bad_fields.data:2"), DataError);

  const fs::path bad_rating = write_text("bad_rating.data", "1\t1\t9\t0\n");
  CHECK_THROWS_WITH_AS(load_movielens(bad_rating), doctest::Contains("9"),
                       DataError);

  const fs::path bad_token = write_text("bad_token.data", "1\tx7\t3\t0\n");
  CHECK_THROWS_AS(load_movielens(bad_token), DataError);

  const fs::path empty = write_text("empty.data", "");
  CHECK_THROWS_AS(load_movielens(empty), DataError);

  CHECK_THROWS_AS(load_movielens(scratch() / "does_not_exist.data"), DataError);
}

TEST_CASE("duplicate user-item pairs are rejected at load time") {
  const fs::path path = write_text("dup.data", "1\t1\t5\t0\n1\t1\t3\t0\n");
  CHECK_THROWS_AS(load_movielens(path), DataError);
}

TEST_CASE("movielens round-trip preserves the triples") {
  RatingsDataset d = oracle::make_random_dataset(11, 15, 15);
  const fs::path path = scratch() / "roundtrip.data";
  save_movielens(d, path);
  RatingsDataset back = load_movielens(path);
  CHECK(back.num_users == d.num_users);
  CHECK(back.num_items == d.num_items);
  CHECK(back.triples == d.triples);
}

TEST_CASE("block-format ratings load from a file or a directory") {
  const std::string block =
      "1:\n"
      "30878,4,2005-12-26\n"
      "124105,5,2004-05-11\n"
      "2:\n"
      "30878,3,2005-01-01\n";
  const fs::path file = write_text("blocks.txt", block);
  RatingsDataset d = load_netflix(file);
  CHECK(d.num_users == 2);
  CHECK(d.num_items == 2);
  CHECK(d.size() == 3);
  CHECK(d.user_labels[0] == "30878");
  CHECK(d.item_labels[1] == "2");

  const fs::path dir = scratch() / "nfdir";
  fs::create_directories(dir);
  {
    std::ofstream a(dir / "mv_0000001.txt");
    a << "1:\n30878,4,2005-12-26\n124105,5,2004-05-11\n";
    std::ofstream b(dir / "mv_0000002.txt");
    b << "2:\n30878,3,2005-01-01\n";
  }
  RatingsDataset d2 = load_netflix(dir);
  CHECK(d2.triples == d.triples);
}

TEST_CASE("block format requires a header before any rating row") {
  const fs::path path = write_text("headless.txt", "30878,4,2005-12-26\n");
  CHECK_THROWS_AS(load_netflix(path), DataError);
}

TEST_CASE("canonical csv round-trip and header enforcement") {
  RatingsDataset d = oracle::make_random_dataset(13, 12, 12);
  const fs::path path = scratch() / "canon.csv";
  save_canonical_csv(d, path);
  RatingsDataset back = load_canonical_csv(path, d.scale_max);
  CHECK(back.triples == d.triples);
  CHECK(back.num_users == d.num_users);
  CHECK(back.num_items == d.num_items);

  const fs::path bad = write_text("noheader.csv", "0,0,5\n");
  CHECK_THROWS_AS(load_canonical_csv(bad), DataError);
}

TEST_CASE("subsample hits the target shape and degree floors") {
  RatingsDataset big = generate_synthetic({200, 150, 0.15, 5, 9});
  SubsampleParams params;
  params.target_users = 60;
  params.target_items = 40;
  params.min_user_degree = 2;
  params.min_item_degree = 2;
  params.seed = 5;
  RatingsDataset sub = subsample(big, params);

  CHECK(sub.num_users == 60);
  CHECK(sub.num_items == 40);
  for (std::uint32_t u = 0; u < sub.num_users; ++u)
    CHECK(sub.items_of(u).size() >= 2);
  for (std::uint32_t i = 0; i < sub.num_items; ++i)
    CHECK(sub.voters_of(i).size() >= 2);

  RatingsDataset again = subsample(big, params);
  CHECK(again.triples == sub.triples);
}

TEST_CASE("a source that already satisfies everything passes through") {
  RatingsDataset d = make_dataset(3, 2, 5,
                                  {{0, 0, 3}, {0, 1, 4},
                                   {1, 0, 2}, {1, 1, 5},
                                   {2, 0, 1}, {2, 1, 1}});
  SubsampleParams params;
  params.target_users = 3;
  params.target_items = 2;
  params.min_user_degree = 2;
  params.min_item_degree = 3;
  RatingsDataset sub = subsample(d, params);
  CHECK(sub.triples == d.triples);
}

TEST_CASE("a 2x2 draw from a complete grid is some exact sub-grid") {
  // complete 3x3 grid with cell-identifying values
  std::vector<Rating> cells;
  for (std::uint32_t u = 0; u < 3; ++u)
    for (std::uint32_t i = 0; i < 3; ++i)
      cells.push_back({u, i, static_cast<int>(u + i + 1)});
  RatingsDataset grid = make_dataset(3, 3, 9, cells);

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SubsampleParams params;
    params.target_users = 2;
    params.target_items = 2;
    params.min_user_degree = 1;
    params.min_item_degree = 1;
    params.seed = seed;
    RatingsDataset sub = subsample(grid, params);

    REQUIRE(sub.size() == 4);
    for (std::uint32_t u = 0; u < 2; ++u) CHECK(sub.items_of(u).size() == 2);
    for (std::uint32_t i = 0; i < 2; ++i) CHECK(sub.voters_of(i).size() == 2);

    // values identify the original cells: (orig_u + orig_i + 1)
    for (const Rating& r : sub.triples) {
      const int orig_u = std::stoi(sub.user_labels[r.user]);
      const int orig_i = std::stoi(sub.item_labels[r.item]);
      CHECK(r.value == orig_u + orig_i + 1);
    }
  }
}

TEST_CASE("subsample reports failure when constraints cannot hold") {
  RatingsDataset tiny = make_dataset(3, 3, 5, {{0, 0, 3}, {1, 1, 4}, {2, 2, 5}});
  SubsampleParams params;
  params.target_users = 3;
  params.target_items = 3;
  params.min_user_degree = 2;
  params.min_item_degree = 2;
  params.max_rounds = 20;
  CHECK_THROWS_AS(subsample(tiny, params), DataError);
}

TEST_CASE("synthetic generation is deterministic with exact cell counts") {
  SyntheticParams params{50, 40, 0.2, 5, 3};
  RatingsDataset a = generate_synthetic(params);
  RatingsDataset b = generate_synthetic(params);
  CHECK(a.triples == b.triples);
  CHECK(a.size() == 400);  // 0.2 * 50 * 40
  CHECK(a.num_users == 50);
  CHECK(a.num_items == 40);
  for (const Rating& r : a.triples) {
    CHECK(r.value >= 1);
    CHECK(r.value <= 5);
  }

  params.seed = 4;
  RatingsDataset c = generate_synthetic(params);
  CHECK_FALSE(c.triples == a.triples);

  CHECK_THROWS_AS(generate_synthetic({0, 10, 0.5}), DataError);
  CHECK_THROWS_AS(generate_synthetic({10, 10, 0.0}), DataError);
  CHECK_THROWS_AS(generate_synthetic({10, 10, 1.5}), DataError);
}

TEST_CASE("full density covers every cell, zero spreads flatten the scale") {
  RatingsDataset full = generate_synthetic({2, 2, 1.0, 5, 1});
  CHECK(full.size() == 4);

  SyntheticParams flat{4, 4, 1.0, 5, 2};
  flat.user_bias_spread = 0.0;
  flat.item_bias_spread = 0.0;
  flat.noise = 0.0;
  RatingsDataset d = generate_synthetic(flat);
  for (const Rating& r : d.triples) CHECK(r.value == 3);  // scale midpoint

  RatingsDataset exact = generate_synthetic({100, 100, 0.1, 5, 3});
  CHECK(exact.size() == 1000);
}

}  // TEST_SUITE
