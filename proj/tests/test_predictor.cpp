#include <doctest.h>

#include <cmath>

#include "channelcf/channel_graph.hpp"
#include "channelcf/predictor.hpp"
#include "channelcf/similarity.hpp"
#include "oracle.hpp"

using namespace channelcf;

namespace {

// Training set where user 0 has not rated item 2 but both voters share the
// level-4 channel on item 0 with them (similarities 1/9 and 1/6).
RatingsDataset neighborhood_fixture() {
  return make_dataset(3, 3, 5,
                      {{0, 0, 4}, {0, 1, 2},
                       {1, 0, 4}, {1, 1, 3}, {1, 2, 5},
                       {2, 0, 4}, {2, 2, 2}});
}

}  // namespace

TEST_SUITE("predictor") {

TEST_CASE("prediction is the mean plus normalized weighted deviations") {
  RatingsDataset train = neighborhood_fixture();
  UserMeans means = compute_user_means(train);
  SimilarityMatrix S = diffusion_similarity(build_channel_graph(train));

  Prediction p = predict(0, 2, train, means, S);
  REQUIRE(p.fallback == Fallback::none);
  CHECK(p.neighbor_count == 2);

  const double s1 = S.get(0, 1), s2 = S.get(0, 2);
  REQUIRE(s1 > 0.0);
  REQUIRE(s2 > 0.0);
  const double kappa = 1.0 / (s1 + s2);
  const double expected = means.of(0) + kappa * (s1 * (5.0 - means.of(1)) +
                                                 s2 * (2.0 - means.of(2)));
  CHECK(p.value == doctest::Approx(expected).epsilon(1e-14));
  CHECK(p.kappa == doctest::Approx(kappa).epsilon(1e-14));
}

TEST_CASE("a single neighbor reduces to mean transfer") {
  // With one voter the normalization cancels the weight entirely:
  // prediction = target mean + (voter rating - voter mean), whatever the
  // similarity magnitude was.
  RatingsDataset train = make_dataset(2, 3, 5,
                                      {{0, 0, 5}, {0, 1, 1},
                                       {1, 0, 5}, {1, 2, 4}});
  UserMeans means = compute_user_means(train);
  SimilarityMatrix S = diffusion_similarity(build_channel_graph(train));
  REQUIRE(S.get(0, 1) > 0.0);

  Prediction p = predict(0, 2, train, means, S);
  REQUIRE(p.fallback == Fallback::none);
  CHECK(p.neighbor_count == 1);
  CHECK(p.value == doctest::Approx(means.of(0) + (4.0 - means.of(1)))
                       .epsilon(1e-14));
}

TEST_CASE("no usable voter falls back to the user mean") {
  RatingsDataset train = make_dataset(2, 2, 5, {{0, 0, 4}, {1, 1, 3}});
  UserMeans means = compute_user_means(train);
  SimilarityMatrix S = diffusion_similarity(build_channel_graph(train));

  // item 1 was rated only by user 1, who shares no channel with user 0
  Prediction p = predict(0, 1, train, means, S);
  CHECK(p.fallback == Fallback::user_mean);
  CHECK(p.value == doctest::Approx(4.0));
  CHECK(p.kappa == 0.0);
  CHECK(p.neighbor_count == 0);
}

TEST_CASE("a user with no training ratings falls back to the global mean") {
  RatingsDataset train = make_dataset(3, 2, 5, {{0, 0, 4}, {1, 0, 2}});
  UserMeans means = compute_user_means(train);
  SimilarityMatrix S = diffusion_similarity(build_channel_graph(train));

  Prediction p = predict(2, 1, train, means, S);
  CHECK(p.fallback == Fallback::global_mean);
  CHECK(p.value == doctest::Approx(3.0));
}

TEST_CASE("voters with zero similarity do not count as neighbors") {
  // user 2 rated the target item but shares no channel with user 0
  RatingsDataset train = make_dataset(3, 3, 5,
                                      {{0, 0, 5}, {1, 0, 5}, {1, 2, 3},
                                       {2, 1, 1}, {2, 2, 4}});
  UserMeans means = compute_user_means(train);
  SimilarityMatrix S = diffusion_similarity(build_channel_graph(train));
  REQUIRE(S.get(0, 2) == 0.0);

  Prediction p = predict(0, 2, train, means, S);
  REQUIRE(p.fallback == Fallback::none);
  CHECK(p.neighbor_count == 1);
}

TEST_CASE("values are not clamped unless asked") {
  // voter deviation pushes the prediction above the scale
  RatingsDataset train = make_dataset(2, 3, 5,
                                      {{0, 0, 5}, {0, 1, 5},
                                       {1, 0, 5}, {1, 1, 1}, {1, 2, 5}});
  UserMeans means = compute_user_means(train);
  SimilarityMatrix S = diffusion_similarity(build_channel_graph(train));

  Prediction raw = predict(0, 2, train, means, S);
  REQUIRE(raw.fallback == Fallback::none);
  CHECK(raw.value > 5.0);

  PredictOptions clamped;
  clamped.clamp = true;
  Prediction c = predict(0, 2, train, means, S, clamped);
  CHECK(c.value == 5.0);
}

TEST_CASE("strict normalization equals the default when weights are positive") {
  RatingsDataset train = neighborhood_fixture();
  UserMeans means = compute_user_means(train);
  SimilarityMatrix S = diffusion_similarity(build_channel_graph(train));

  PredictOptions strict;
  strict.strict_kappa = true;
  Prediction a = predict(0, 2, train, means, S);
  Prediction b = predict(0, 2, train, means, S, strict);
  CHECK(a.value == b.value);
  CHECK(a.kappa == b.kappa);
}

TEST_CASE("strict normalization refuses a vanishing signed sum") {
  // Two voters with exactly opposite correlation weights: the signed sum
  // is 0, so strict mode must fall back instead of dividing by it.
  RatingsDataset train = make_dataset(3, 5, 5,
                                      {{0, 0, 1}, {0, 1, 5},
                                       {1, 0, 1}, {1, 1, 5}, {1, 4, 5},
                                       {2, 0, 5}, {2, 1, 1}, {2, 4, 1}});
  UserMeans means = compute_user_means(train);
  SimilarityMatrix S = pearson_similarity(train);
  REQUIRE(S.get(0, 1) == 1.0);
  REQUIRE(S.get(0, 2) == -1.0);

  PredictOptions strict;
  strict.strict_kappa = true;
  Prediction p = predict(0, 4, train, means, S, strict);
  CHECK(p.fallback == Fallback::user_mean);

  Prediction lax = predict(0, 4, train, means, S);
  CHECK(lax.fallback == Fallback::none);
  CHECK(lax.kappa == doctest::Approx(0.5));
}

TEST_CASE("top-k keeps only the strongest voters") {
  RatingsDataset train = neighborhood_fixture();
  UserMeans means = compute_user_means(train);
  SimilarityMatrix S = diffusion_similarity(build_channel_graph(train));
  REQUIRE(S.get(0, 1) != S.get(0, 2));

  PredictOptions one;
  one.top_k = 1;
  Prediction p = predict(0, 2, train, means, S, one);
  REQUIRE(p.fallback == Fallback::none);
  CHECK(p.neighbor_count == 1);

  const bool first_stronger = S.get(0, 1) > S.get(0, 2);
  const double rating = first_stronger ? 5.0 : 2.0;
  const double mean = first_stronger ? means.of(1) : means.of(2);
  CHECK(p.value == doctest::Approx(means.of(0) + (rating - mean)));
}

TEST_CASE("kappa is positive exactly when no fallback fired") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    RatingsDataset d = oracle::make_random_dataset(seed, 20, 20);
    Split s = split_dataset(d, 30, seed, 0);
    if (s.train.size() == 0 || s.probe.empty()) continue;
    UserMeans means = compute_user_means(s.train);
    SimilarityMatrix S = diffusion_similarity(build_channel_graph(s.train));
    for (const Prediction& p : predict_probe(s, S, means)) {
      if (p.fallback == Fallback::none) {
        CHECK(p.kappa > 0.0);
        CHECK(p.neighbor_count > 0);
      } else {
        CHECK(p.kappa == 0.0);
        CHECK(p.neighbor_count == 0);
      }
    }
  }
}

TEST_CASE("probe predictions align one to one and ignore thread count") {
  RatingsDataset d = oracle::make_random_dataset(5, 25, 25);
  Split s = split_dataset(d, 20, 3, 0);
  UserMeans means = compute_user_means(s.train);
  SimilarityMatrix S = diffusion_similarity(build_channel_graph(s.train));

  std::vector<Prediction> a = predict_probe(s, S, means, {}, 1);
  std::vector<Prediction> b = predict_probe(s, S, means, {}, 4);
  REQUIRE(a.size() == s.probe.size());
  REQUIRE(b.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].user == s.probe[i].user);
    CHECK(a[i].item == s.probe[i].item);
    CHECK(a[i].value == b[i].value);  // bitwise
  }
}

TEST_CASE("out-of-range ids are rejected") {
  RatingsDataset train = neighborhood_fixture();
  UserMeans means = compute_user_means(train);
  SimilarityMatrix S = diffusion_similarity(build_channel_graph(train));
  CHECK_THROWS(predict(3, 0, train, means, S));
  CHECK_THROWS(predict(0, 3, train, means, S));
}

}  // TEST_SUITE
