#pragma once

// Weighted finite data sets, chart morphisms, covers and the Čech nerve.
//
// Point indices are 1-based everywhere in this library, matching the input
// file formats: index i addresses points()[i - 1].

#include <algorithm>
#include <iterator>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ckls/error.hpp"
#include "ckls/linalg.hpp"

namespace ckls {

using IndexSet = std::set<std::size_t>;

struct WeightedPoint {
  RatVector x;
  Rational y;
  Rational weight = 1;

  friend bool operator==(const WeightedPoint&, const WeightedPoint&) = default;
};

enum class WeightPolicy { nonnegative, allow_negative };

class WeightedDataSet {
public:
  WeightedDataSet() = default;
  WeightedDataSet(std::size_t ambient_dim, std::vector<WeightedPoint> points,
                  WeightPolicy policy = WeightPolicy::nonnegative)
      : ambient_dim_(ambient_dim), points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (points_[i].x.dim() != ambient_dim_)
        throw DimensionMismatch("point " + std::to_string(i + 1) + " has dimension " +
                                std::to_string(points_[i].x.dim()) + ", expected " +
                                std::to_string(ambient_dim_));
      if (policy == WeightPolicy::nonnegative && points_[i].weight.sign() < 0)
        throw NegativeWeight("point " + std::to_string(i + 1) + " has negative weight " +
                             points_[i].weight.to_string());
    }
  }

  std::size_t ambient_dim() const noexcept { return ambient_dim_; }
  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<WeightedPoint>& points() const noexcept { return points_; }
  const WeightedPoint& point(std::size_t index) const { return points_.at(index - 1); }

  RatVector weights() const {
    RatVector w(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) w[i] = points_[i].weight;
    return w;
  }

  IndexSet all_indices() const {
    IndexSet s;
    for (std::size_t i = 1; i <= points_.size(); ++i) s.insert(i);
    return s;
  }

  void check_indices(const IndexSet& indices) const {
    for (auto i : indices)
      if (i < 1 || i > points_.size())
        throw IndexOutOfRange("index " + std::to_string(i) + " outside 1.." +
                              std::to_string(points_.size()));
  }

  friend bool operator==(const WeightedDataSet&, const WeightedDataSet&) = default;

private:
  friend WeightedDataSet restrict(const WeightedDataSet&, const IndexSet&);

  std::size_t ambient_dim_ = 0;
  std::vector<WeightedPoint> points_;
};

/// Zeroes the weight of every point outside `keep`; indexing is preserved.
inline WeightedDataSet restrict(const WeightedDataSet& data, const IndexSet& keep) {
  data.check_indices(keep);
  WeightedDataSet out = data;
  for (std::size_t i = 1; i <= out.size(); ++i)
    if (!keep.contains(i)) out.points_[i - 1].weight = 0;
  return out;
}

/// Injection of a chart's points into a base data set, as a strictly
/// increasing list of 1-based target indices.
class ChartMorphism {
public:
  ChartMorphism() = default;
  explicit ChartMorphism(std::vector<std::size_t> source_indices)
      : indices_(std::move(source_indices)) {
    for (std::size_t k = 1; k < indices_.size(); ++k)
      if (indices_[k] <= indices_[k - 1])
        throw IndexOutOfRange("chart indices must be strictly increasing");
    if (!indices_.empty() && indices_.front() < 1)
      throw IndexOutOfRange("chart indices are 1-based");
  }

  const std::vector<std::size_t>& source_indices() const noexcept { return indices_; }
  IndexSet image() const { return IndexSet(indices_.begin(), indices_.end()); }

private:
  std::vector<std::size_t> indices_;
};

struct Chart {
  std::string name;
  ChartMorphism morphism;
};

class Cover {
public:
  Cover() = default;
  Cover(WeightedDataSet base, std::vector<Chart> charts)
      : base_(std::move(base)), charts_(std::move(charts)) {
    std::set<std::string> names;
    for (const auto& c : charts_) {
      if (!names.insert(c.name).second) throw ParseError("duplicate chart name '" + c.name + "'");
      base_.check_indices(c.morphism.image());
    }
    std::sort(charts_.begin(), charts_.end(),
              [](const Chart& a, const Chart& b) { return a.name < b.name; });
  }

  /// One chart named `name` covering every point.
  static Cover whole(WeightedDataSet base, std::string name = "D") {
    std::vector<std::size_t> all;
    for (std::size_t i = 1; i <= base.size(); ++i) all.push_back(i);
    std::vector<Chart> charts{{std::move(name), ChartMorphism(std::move(all))}};
    return Cover(std::move(base), std::move(charts));
  }

  const WeightedDataSet& base() const noexcept { return base_; }
  /// Charts sorted by name.
  const std::vector<Chart>& charts() const noexcept { return charts_; }

  const Chart* find(const std::string& name) const {
    for (const auto& c : charts_)
      if (c.name == name) return &c;
    return nullptr;
  }

private:
  WeightedDataSet base_;
  std::vector<Chart> charts_;
};

inline void validate_cover(const Cover& cover) {
  IndexSet covered;
  for (const auto& c : cover.charts()) {
    auto img = c.morphism.image();
    covered.insert(img.begin(), img.end());
  }
  std::vector<std::size_t> missing;
  for (std::size_t i = 1; i <= cover.base().size(); ++i)
    if (!covered.contains(i)) missing.push_back(i);
  if (!missing.empty()) throw NotACover(std::move(missing));
}

/// A nonempty intersection of k + 1 distinct charts; k is the Čech degree.
struct NerveCell {
  std::vector<std::string> chart_names;  // sorted
  IndexSet indices;

  std::size_t degree() const { return chart_names.size() - 1; }

  /// "U1|U2"-style key.
  std::string key() const {
    std::string s;
    for (std::size_t i = 0; i < chart_names.size(); ++i) {
      if (i) s += "|";
      s += chart_names[i];
    }
    return s;
  }

  friend bool operator==(const NerveCell&, const NerveCell&) = default;
};

/// Cells of degree ≤ max_degree, ordered by degree then by chart names.
inline std::vector<NerveCell> enumerate_nerve(const Cover& cover, std::size_t max_degree) {
  const auto& charts = cover.charts();
  std::vector<IndexSet> images;
  for (const auto& c : charts) images.push_back(c.morphism.image());

  std::vector<NerveCell> cells;
  std::vector<std::size_t> members;
  // depth-first over increasing chart positions yields lexicographic order
  // within a fixed size
  auto extend = [&](auto&& self, std::size_t size, std::size_t start, const IndexSet& common) {
    if (members.size() == size) {
      NerveCell cell;
      for (auto m : members) cell.chart_names.push_back(charts[m].name);
      cell.indices = common;
      cells.push_back(std::move(cell));
      return;
    }
    for (std::size_t m = start; m < charts.size(); ++m) {
      IndexSet next;
      if (members.empty()) {
        next = images[m];
      } else {
        std::set_intersection(common.begin(), common.end(), images[m].begin(), images[m].end(),
                              std::inserter(next, next.end()));
      }
      if (next.empty()) continue;
      members.push_back(m);
      self(self, size, m + 1, next);
      members.pop_back();
    }
  };
  for (std::size_t k = 0; k <= max_degree && k < charts.size(); ++k) extend(extend, k + 1, 0, {});
  return cells;
}

}  // namespace ckls
