#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ckls/dataset.hpp"
#include "ckls/error.hpp"
#include "ckls/linalg.hpp"

namespace ckls {

/// Model linear in its parameters: f(x, a) = φ(x)·a, where each feature is a
/// monomial in the input coordinates.
class FeatureMap {
public:
  using Exponents = std::vector<unsigned>;

  FeatureMap() = default;
  explicit FeatureMap(std::vector<Exponents> monomials) : monomials_(std::move(monomials)) {
    if (monomials_.empty()) throw DimensionMismatch("feature map needs at least one monomial");
    for (const auto& m : monomials_)
      if (m.size() != monomials_.front().size())
        throw DimensionMismatch("monomial exponent lists differ in length");
  }

  std::size_t param_dim() const noexcept { return monomials_.size(); }
  std::size_t ambient_dim() const { return monomials_.empty() ? 0 : monomials_.front().size(); }
  const std::vector<Exponents>& monomials() const noexcept { return monomials_; }

  RatVector operator()(const RatVector& x) const {
    if (x.dim() != ambient_dim())
      throw DimensionMismatch("feature map expects dimension " + std::to_string(ambient_dim()) +
                              ", got " + std::to_string(x.dim()));
    RatVector phi(monomials_.size());
    for (std::size_t k = 0; k < monomials_.size(); ++k) {
      Rational v = 1;
      for (std::size_t c = 0; c < x.dim(); ++c)
        for (unsigned e = 0; e < monomials_[k][c]; ++e) v *= x[c];
      phi[k] = v;
    }
    return phi;
  }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

private:
  std::vector<Exponents> monomials_;
};

/// φ(x) = (x₁, …, x_d, 1).
inline FeatureMap affine_features(std::size_t ambient_dim) {
  if (ambient_dim < 1) throw DimensionMismatch("affine features need ambient_dim >= 1");
  std::vector<FeatureMap::Exponents> monomials;
  for (std::size_t c = 0; c < ambient_dim; ++c) {
    FeatureMap::Exponents e(ambient_dim, 0);
    e[c] = 1;
    monomials.push_back(std::move(e));
  }
  monomials.emplace_back(ambient_dim, 0);
  return FeatureMap(std::move(monomials));
}

/// Normal equations η = ν + N·a of the weighted squared loss, with
///   ν  = −2 Σ_j ω_j y_j φ(x_j)
///   N  = +2 Σ_j ω_j φ(x_j) φ(x_j)ᵀ.
/// The per-point (φ(x_j), y_j) are kept so that ν and N can be re-evaluated
/// exactly at other weights.
class NormalSystem {
public:
  struct Contribution {
    RatVector phi;
    Rational y;
    friend bool operator==(const Contribution&, const Contribution&) = default;
  };

  NormalSystem(std::vector<Contribution> contributions, std::size_t param_dim, RatVector weights)
      : contributions_(std::move(contributions)), param_dim_(param_dim) {
    evaluate(std::move(weights));
  }

  std::size_t param_dim() const noexcept { return param_dim_; }
  std::size_t num_points() const noexcept { return contributions_.size(); }
  const std::vector<Contribution>& contributions() const noexcept { return contributions_; }
  const RatVector& weights() const noexcept { return weights_; }
  const RatVector& nu() const noexcept { return nu_; }
  const RatMatrix& N() const noexcept { return n_; }

  /// The same system evaluated at different weights.
  NormalSystem reweighted(RatVector weights) const {
    NormalSystem s = *this;
    s.evaluate(std::move(weights));
    return s;
  }

  /// Weights outside `keep` (1-based) set to zero.
  NormalSystem restricted(const IndexSet& keep) const {
    for (auto i : keep)
      if (i < 1 || i > num_points())
        throw IndexOutOfRange("index " + std::to_string(i) + " outside 1.." +
                              std::to_string(num_points()));
    RatVector w = weights_;
    for (std::size_t i = 1; i <= w.dim(); ++i)
      if (!keep.contains(i)) w[i - 1] = 0;
    return reweighted(std::move(w));
  }

  /// η(a) = ν + N·a.
  RatVector gradient(const RatVector& a) const { return nu_ + n_ * a; }

private:
  void evaluate(RatVector weights) {
    if (weights.dim() != contributions_.size())
      throw DimensionMismatch("weight vector has " + std::to_string(weights.dim()) +
                              " entries for " + std::to_string(contributions_.size()) + " points");
    weights_ = std::move(weights);
    nu_ = RatVector(param_dim_);
    n_ = RatMatrix(param_dim_, param_dim_);
    for (std::size_t j = 0; j < contributions_.size(); ++j) {
      const Rational& w = weights_[j];
      if (w.is_zero()) continue;
      const auto& [phi, y] = contributions_[j];
      const Rational two_w = Rational(2) * w;
      for (std::size_t k = 0; k < param_dim_; ++k) {
        nu_[k] -= two_w * y * phi[k];
        for (std::size_t l = 0; l < param_dim_; ++l) n_(k, l) += two_w * phi[k] * phi[l];
      }
    }
  }

  std::vector<Contribution> contributions_;
  std::size_t param_dim_;
  RatVector weights_;
  RatVector nu_;
  RatMatrix n_;
};

inline NormalSystem build_normal_system(const WeightedDataSet& data, const FeatureMap& features) {
  if (features.ambient_dim() != data.ambient_dim())
    throw DimensionMismatch("feature map has ambient dimension " +
                            std::to_string(features.ambient_dim()) + ", data has " +
                            std::to_string(data.ambient_dim()));
  std::vector<NormalSystem::Contribution> contributions;
  contributions.reserve(data.size());
  for (const auto& p : data.points()) contributions.push_back({features(p.x), p.y});
  return NormalSystem(std::move(contributions), features.param_dim(), data.weights());
}

struct LSSolution {
  RatVector a_hat;
  std::string chart;
};

/// Solves N·a = −ν. Throws Singular carrying rank(N) when the chart has too
/// few effective points.
inline LSSolution solve_least_squares(const NormalSystem& system, std::string chart = {}) {
  try {
    return {solve_square(system.N(), -system.nu()), std::move(chart)};
  } catch (const Singular&) {
    const std::size_t r = rank(system.N());
    std::string what = "normal matrix";
    if (!chart.empty()) what += " on " + chart;
    what += " is singular (rank " + std::to_string(r) + " < " +
            std::to_string(system.param_dim()) + ")";
    throw Singular(what, r, chart);
  }
}

/// Σ_j ω_j (y_j − φ(x_j)·a)².
inline Rational loss_eval(const WeightedDataSet& data, const FeatureMap& features,
                          const RatVector& a) {
  if (a.dim() != features.param_dim())
    throw DimensionMismatch("parameter vector has dimension " + std::to_string(a.dim()) +
                            ", model has " + std::to_string(features.param_dim()));
  Rational total;
  for (const auto& p : data.points()) {
    if (p.weight.is_zero()) continue;
    const Rational r = p.y - features(p.x).dot(a);
    total += p.weight * r * r;
  }
  return total;
}

}  // namespace ckls
