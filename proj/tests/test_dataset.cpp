#include <gtest/gtest.h>

#include "ckls/dataset.hpp"
#include "test_support.hpp"

namespace ckls {
namespace {

using testing::chart;
using testing::q;
using testing::toy_data;

TEST(Restrict, ZeroesWeightsOutsideKeep) {
  const auto r = restrict(toy_data(), {2, 3, 4});
  EXPECT_EQ(r.weights(), (RatVector{0, 1, 1, 1, 0}));
  EXPECT_EQ(r.size(), 5u);
  EXPECT_EQ(r.point(5).x, toy_data().point(5).x);
}

TEST(Restrict, IdentityAndEmpty) {
  EXPECT_EQ(restrict(toy_data(), toy_data().all_indices()), toy_data());
  EXPECT_TRUE(restrict(toy_data(), {}).weights().is_zero());
  EXPECT_THROW(restrict(toy_data(), {0}), IndexOutOfRange);
  EXPECT_THROW(restrict(toy_data(), {6}), IndexOutOfRange);
}

TEST(Restrict, ComposesAsIntersection) {
  testing::Random rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto data = rng.dataset(static_cast<std::size_t>(rng.integer(1, 10)), 2);
    const auto a = rng.subset(data.size());
    const auto b = rng.subset(data.size());
    IndexSet ab;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(ab, ab.end()));
    EXPECT_EQ(restrict(restrict(data, a), b), restrict(data, ab));
  }
}

TEST(WeightedDataSet, RejectsBadPoints) {
  EXPECT_THROW(WeightedDataSet(2, {{RatVector{1}, 0, 1}}), DimensionMismatch);
  EXPECT_THROW(WeightedDataSet(1, {{RatVector{1}, 0, -1}}), NegativeWeight);
  EXPECT_NO_THROW(WeightedDataSet(1, {{RatVector{1}, 0, -1}}, WeightPolicy::allow_negative));
  // duplicate x-points are allowed
  EXPECT_NO_THROW(WeightedDataSet(1, {{RatVector{1}, 0, 1}, {RatVector{1}, 3, 1}}));
}

TEST(ChartMorphism, RequiresStrictlyIncreasing) {
  EXPECT_THROW(ChartMorphism({2, 2}), IndexOutOfRange);
  EXPECT_THROW(ChartMorphism({3, 1}), IndexOutOfRange);
  EXPECT_THROW(ChartMorphism({0, 1}), IndexOutOfRange);
  EXPECT_THROW(Cover(toy_data(), {chart("U", {1, 9})}), IndexOutOfRange);
}

TEST(ValidateCover, Examples) {
  EXPECT_NO_THROW(validate_cover(testing::toy_cover()));
  EXPECT_NO_THROW(validate_cover(Cover::whole(toy_data())));

  std::vector<WeightedPoint> four(4, WeightedPoint{RatVector{0}, 0, 1});
  const Cover partial(WeightedDataSet(1, four), {chart("A", {1, 2}), chart("B", {2, 3})});
  try {
    validate_cover(partial);
    FAIL() << "expected NotACover";
  } catch (const NotACover& e) {
    EXPECT_EQ(e.missing(), (std::vector<std::size_t>{4}));
  }
}

TEST(ValidateCover, AcceptsExactlyWhenEveryIndexAppears) {
  testing::Random rng(17);
  const auto data = toy_data();
  for (int t = 0; t < 100; ++t) {
    std::vector<Chart> charts;
    IndexSet covered;
    const int k = rng.integer(1, 3);
    for (int c = 0; c < k; ++c) {
      const auto s = rng.subset(data.size());
      covered.insert(s.begin(), s.end());
      charts.push_back(chart("C" + std::to_string(c), {s.begin(), s.end()}));
    }
    const Cover cover(data, charts);
    if (covered.size() == data.size())
      EXPECT_NO_THROW(validate_cover(cover));
    else
      EXPECT_THROW(validate_cover(cover), NotACover);
  }
}

TEST(Cover, DuplicateNamesRejected) {
  EXPECT_THROW(Cover(toy_data(), {chart("U", {1}), chart("U", {2})}), ParseError);
}

TEST(EnumerateNerve, ToyCover) {
  const auto cells = enumerate_nerve(testing::toy_cover(), 1);
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_EQ(cells[0].chart_names, (std::vector<std::string>{"U1"}));
  EXPECT_EQ(cells[1].chart_names, (std::vector<std::string>{"U2"}));
  EXPECT_EQ(cells[2].chart_names, (std::vector<std::string>{"U1", "U2"}));
  EXPECT_EQ(cells[2].indices, (IndexSet{2, 3, 4}));
  EXPECT_EQ(cells[2].key(), "U1|U2");
}

TEST(EnumerateNerve, SingleChart) {
  for (std::size_t d : {0u, 1u, 5u}) {
    const auto cells = enumerate_nerve(Cover::whole(toy_data()), d);
    ASSERT_EQ(cells.size(), 1u);
    EXPECT_EQ(cells[0].degree(), 0u);
  }
}

TEST(EnumerateNerve, TripleOverlap) {
  const Cover cover(toy_data(), {chart("U1", {1, 2, 3}), chart("U2", {2, 3, 4}),
                                 chart("U3", {3, 4, 5})});
  const auto cells = enumerate_nerve(cover, 2);
  ASSERT_EQ(cells.size(), 7u);
  EXPECT_EQ(cells.back().key(), "U1|U2|U3");
  EXPECT_EQ(cells.back().indices, (IndexSet{3}));
  EXPECT_EQ(cells[5].key(), "U2|U3");
  EXPECT_EQ(cells[5].indices, (IndexSet{3, 4}));
  EXPECT_EQ(enumerate_nerve(cover, 0).size(), 3u);
}

TEST(EnumerateNerve, SkipsEmptyIntersectionsAndIsFaceClosed) {
  testing::Random rng(23);
  for (int t = 0; t < 60; ++t) {
    const auto data = rng.dataset(8, 1);
    std::vector<Chart> charts;
    const int k = rng.integer(1, 5);
    for (int c = 0; c < k; ++c) {
      const auto s = rng.subset(data.size());
      charts.push_back(chart(std::string(1, static_cast<char>('E' - c)), {s.begin(), s.end()}));
    }
    const Cover cover(data, charts);
    const auto cells = enumerate_nerve(cover, 3);
    std::set<std::vector<std::string>> seen;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& c = cells[i];
      EXPECT_FALSE(c.indices.empty());
      EXPECT_TRUE(std::is_sorted(c.chart_names.begin(), c.chart_names.end()));
      if (i > 0) {
        const auto& p = cells[i - 1];
        EXPECT_TRUE(p.degree() < c.degree() ||
                    (p.degree() == c.degree() && p.chart_names < c.chart_names));
      }
      if (c.degree() > 0)
        for (std::size_t drop = 0; drop < c.chart_names.size(); ++drop) {
          auto face = c.chart_names;
          face.erase(face.begin() + static_cast<long>(drop));
          EXPECT_TRUE(seen.contains(face));
        }
      seen.insert(c.chart_names);
    }
    EXPECT_EQ(enumerate_nerve(cover, 3), cells);
  }
}

}  // namespace
}  // namespace ckls
