#pragma once

// Koszul complexes over the linearized ring R/𝔦²_𝔞, where 𝔦_𝔞 is generated by
// the a_i − 𝔞_i. Wedge slots e^1..e^n are labelled 1-based.

#include <concepts>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ckls/dataset.hpp"
#include "ckls/error.hpp"
#include "ckls/linalg.hpp"
#include "ckls/model.hpp"

namespace ckls {

/// Strictly increasing 1-based slot indices i₀ < … < i_{p−1} naming e^{i₀}∧…∧e^{i_{p−1}}.
using Wedge = std::vector<std::size_t>;

template <class T>
concept KoszulCoefficient = std::copyable<T> && requires(T a, const T b) {
  a += b;
  { -b } -> std::convertible_to<T>;
  { b.is_zero() } -> std::convertible_to<bool>;
};

/// Interior multiplication by Σ η^i e^i over any commutative coefficient ring:
///   ι(F e^{i₀}∧…∧e^{i_{p−1}}) = Σ_j (−1)^j (F·η^{i_j}) e^{i₀}∧…ê^{i_j}…∧e^{i_{p−1}}.
/// `eta[i - 1]` holds η^i. Zero terms are dropped from the result.
template <KoszulCoefficient Coeff, class Mul>
std::map<Wedge, Coeff> interior_multiply(const std::map<Wedge, Coeff>& terms,
                                         std::span<const Coeff> eta, Mul&& mul) {
  std::map<Wedge, Coeff> out;
  for (const auto& [wedge, coeff] : terms) {
    for (std::size_t j = 0; j < wedge.size(); ++j) {
      Coeff term = mul(coeff, eta[wedge[j] - 1]);
      if (term.is_zero()) continue;
      if (j % 2 == 1) term = -term;
      Wedge face;
      face.reserve(wedge.size() - 1);
      for (std::size_t k = 0; k < wedge.size(); ++k)
        if (k != j) face.push_back(wedge[k]);
      auto [it, inserted] = out.try_emplace(std::move(face), term);
      if (!inserted) it->second += term;
    }
  }
  std::erase_if(out, [](const auto& kv) { return kv.second.is_zero(); });
  return out;
}

/// c0 + c·(a − base) modulo quadratic terms in (a − base).
class LinearizedElement {
public:
  LinearizedElement() = default;
  explicit LinearizedElement(RatVector base) : base_(std::move(base)), c_(base_.dim()) {}
  LinearizedElement(RatVector base, Rational c0, RatVector c)
      : base_(std::move(base)), c0_(std::move(c0)), c_(std::move(c)) {
    if (c_.dim() != base_.dim())
      throw DimensionMismatch("linear coefficients have dimension " + std::to_string(c_.dim()) +
                              ", base has " + std::to_string(base_.dim()));
  }

  /// The generator a_i − base_i (i is 1-based).
  static LinearizedElement generator(const RatVector& base, std::size_t i) {
    return {base, 0, RatVector::unit(base.dim(), i - 1)};
  }

  const RatVector& base() const noexcept { return base_; }
  const Rational& c0() const noexcept { return c0_; }
  const RatVector& c() const noexcept { return c_; }
  std::size_t dim() const noexcept { return base_.dim(); }
  bool is_zero() const { return c0_.is_zero() && c_.is_zero(); }

  /// Same coefficients, read against a different base.
  LinearizedElement rebased(RatVector new_base) const {
    if (new_base.dim() != base_.dim())
      throw DimensionMismatch("cannot rebase to a point of different dimension");
    return {std::move(new_base), c0_, c_};
  }

  LinearizedElement& operator+=(const LinearizedElement& o) {
    require_same_base(o);
    c0_ += o.c0_;
    c_ += o.c_;
    return *this;
  }
  LinearizedElement& operator-=(const LinearizedElement& o) {
    require_same_base(o);
    c0_ -= o.c0_;
    c_ -= o.c_;
    return *this;
  }
  LinearizedElement& operator*=(const Rational& s) {
    c0_ *= s;
    c_ *= s;
    return *this;
  }
  friend LinearizedElement operator+(LinearizedElement a, const LinearizedElement& b) { return a += b; }
  friend LinearizedElement operator-(LinearizedElement a, const LinearizedElement& b) { return a -= b; }
  friend LinearizedElement operator*(LinearizedElement a, const Rational& s) { return a *= s; }
  friend LinearizedElement operator*(const Rational& s, LinearizedElement a) { return a *= s; }
  LinearizedElement operator-() const { return *this * Rational(-1); }

  friend bool operator==(const LinearizedElement&, const LinearizedElement&) = default;

private:
  void require_same_base(const LinearizedElement& o) const {
    if (o.base_ != base_) throw BaseMismatch();
  }

  RatVector base_;
  Rational c0_;
  RatVector c_;
};

/// Product in R/𝔦²: the product of the two linear parts vanishes.
inline LinearizedElement ring_mul(const LinearizedElement& u, const LinearizedElement& v) {
  if (u.base() != v.base()) throw BaseMismatch();
  return {u.base(), u.c0() * v.c0(), u.c0() * v.c() + v.c0() * u.c()};
}

/// Degree-p element of the linearized Koszul complex of rank n. Absent wedges
/// are zero; stored coefficients are never zero. For p > n the module is zero.
class KoszulElement {
public:
  KoszulElement() = default;
  KoszulElement(std::size_t n, std::size_t degree, RatVector base)
      : n_(n), degree_(degree), base_(std::move(base)) {
    if (base_.dim() != n_)
      throw DimensionMismatch("base point has dimension " + std::to_string(base_.dim()) +
                              ", rank is " + std::to_string(n_));
  }

  /// Wedge slots with constant coefficients.
  static KoszulElement constant(std::size_t degree, const RatVector& base,
                                const std::map<Wedge, Rational>& values) {
    KoszulElement xi(base.dim(), degree, base);
    for (const auto& [w, v] : values) xi.set(w, {base, v, RatVector(base.dim())});
    return xi;
  }

  std::size_t rank() const noexcept { return n_; }
  std::size_t degree() const noexcept { return degree_; }
  const RatVector& base() const noexcept { return base_; }
  const std::map<Wedge, LinearizedElement>& coeffs() const noexcept { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }

  LinearizedElement coefficient(const Wedge& w) const {
    if (auto it = coeffs_.find(w); it != coeffs_.end()) return it->second;
    return LinearizedElement(base_);
  }

  void set(const Wedge& w, LinearizedElement value) {
    check_wedge(w);
    if (value.base() != base_) throw BaseMismatch();
    if (value.is_zero())
      coeffs_.erase(w);
    else
      coeffs_.insert_or_assign(w, std::move(value));
  }

  void add(const Wedge& w, const LinearizedElement& value) { set(w, coefficient(w) + value); }

  KoszulElement& operator+=(const KoszulElement& o) {
    require_compatible(o);
    for (const auto& [w, v] : o.coeffs_) add(w, v);
    return *this;
  }
  KoszulElement& operator-=(const KoszulElement& o) {
    require_compatible(o);
    for (const auto& [w, v] : o.coeffs_) add(w, -v);
    return *this;
  }
  KoszulElement& operator*=(const Rational& s) {
    if (s.is_zero()) {
      coeffs_.clear();
      return *this;
    }
    for (auto& [w, v] : coeffs_) v *= s;
    return *this;
  }
  friend KoszulElement operator+(KoszulElement a, const KoszulElement& b) { return a += b; }
  friend KoszulElement operator-(KoszulElement a, const KoszulElement& b) { return a -= b; }
  friend KoszulElement operator*(KoszulElement a, const Rational& s) { return a *= s; }
  friend KoszulElement operator*(const Rational& s, KoszulElement a) { return a *= s; }

  friend bool operator==(const KoszulElement&, const KoszulElement&) = default;

private:
  friend KoszulElement translate(const KoszulElement&, const RatVector&);

  void check_wedge(const Wedge& w) const {
    if (w.size() != degree_)
      throw DimensionMismatch("wedge of length " + std::to_string(w.size()) +
                              " in a degree-" + std::to_string(degree_) + " element");
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (w[k] < 1 || w[k] > n_)
        throw IndexOutOfRange("wedge slot " + std::to_string(w[k]) + " outside 1.." +
                              std::to_string(n_));
      if (k > 0 && w[k] <= w[k - 1])
        throw IndexOutOfRange("wedge slots must be strictly increasing");
    }
  }

  void require_compatible(const KoszulElement& o) const {
    if (o.base_ != base_) throw BaseMismatch();
    if (o.n_ != n_ || o.degree_ != degree_)
      throw DimensionMismatch("Koszul elements of different rank or degree");
  }

  std::size_t n_ = 0;
  std::size_t degree_ = 0;
  RatVector base_;
  std::map<Wedge, LinearizedElement> coeffs_;
};

/// The linearized differential η^i = N^i·(a − base) at a chart's weights.
class LinearizedDifferential {
public:
  LinearizedDifferential(RatVector base, RatMatrix n) : base_(std::move(base)), n_(std::move(n)) {
    if (!n_.is_square() || n_.rows() != base_.dim())
      throw DimensionMismatch("normal matrix shape does not match base dimension");
  }

  const RatVector& base() const noexcept { return base_; }
  const RatMatrix& N() const noexcept { return n_; }
  std::size_t rank() const noexcept { return base_.dim(); }

  /// η^i, 1-based.
  LinearizedElement eta(std::size_t i) const { return {base_, 0, n_.row(i - 1)}; }

  std::vector<LinearizedElement> etas() const {
    std::vector<LinearizedElement> out;
    for (std::size_t i = 1; i <= rank(); ++i) out.push_back(eta(i));
    return out;
  }

  /// Same N read at another base point.
  LinearizedDifferential rebased(RatVector new_base) const { return {std::move(new_base), n_}; }

private:
  RatVector base_;
  RatMatrix n_;
};

inline KoszulElement koszul_diff(const KoszulElement& xi, const LinearizedDifferential& eta) {
  if (xi.base() != eta.base()) throw BaseMismatch();
  if (xi.degree() == 0) throw DegreeZero();
  const auto etas = eta.etas();
  KoszulElement out(xi.rank(), xi.degree() - 1, xi.base());
  for (auto& [w, v] : interior_multiply(xi.coeffs(), std::span<const LinearizedElement>(etas),
                                        [](const auto& f, const auto& g) { return ring_mul(f, g); }))
    out.set(w, v);
  return out;
}

/// Rebases via the substitution a ↦ a − (new_base − base): every coefficient
/// keeps (c0, c), so c·(a − base) becomes c·(a − new_base).
inline KoszulElement translate(const KoszulElement& xi, const RatVector& new_base) {
  if (new_base.dim() != xi.rank())
    throw DimensionMismatch("translation target has dimension " + std::to_string(new_base.dim()) +
                            ", rank is " + std::to_string(xi.rank()));
  KoszulElement out(xi.rank(), xi.degree(), new_base);
  for (const auto& [w, v] : xi.coeffs_) out.coeffs_.emplace(w, v.rebased(new_base));
  return out;
}

/// N of `system` with weights zeroed outside the cell, paired with `base`.
inline LinearizedDifferential restrict_differential(const NormalSystem& system,
                                                    const NerveCell& cell, const RatVector& base) {
  if (base.dim() != system.param_dim())
    throw DimensionMismatch("base has dimension " + std::to_string(base.dim()) +
                            ", model has " + std::to_string(system.param_dim()));
  return {base, system.restricted(cell.indices).N()};
}

/// The linear system for a degree-2 preimage has no solution.
class Obstructed : public Error {
public:
  Obstructed(RatVector residual, RatVector witness)
      : Error("no degree-2 witness exists"),
        residual_(std::move(residual)),
        witness_(std::move(witness)) {}

  const RatVector& residual() const noexcept { return residual_; }
  const RatVector& witness() const noexcept { return witness_; }

private:
  RatVector residual_;
  RatVector witness_;
};

/// Finds q of degree 1 with constant coefficients and ι(q) = target.
/// ι(Σ β_i e^i) has linear part Nᵀβ, so β solves Nᵀβ = c.
inline KoszulElement solve_homotopy_deg1(const KoszulElement& target,
                                         const LinearizedDifferential& eta) {
  if (target.degree() != 0) throw DimensionMismatch("degree-1 homotopy needs a degree-0 target");
  if (target.base() != eta.base()) throw BaseMismatch();
  const LinearizedElement t = target.coefficient({});
  if (!t.c0().is_zero())
    throw ConstantObstruction("target has constant term " + t.c0().to_string());
  const RatVector beta = solve_square(eta.N().transpose(), t.c());
  std::map<Wedge, Rational> values;
  for (std::size_t i = 0; i < beta.dim(); ++i) values[{i + 1}] = beta[i];
  return KoszulElement::constant(1, target.base(), values);
}

/// Finds r of degree 2 with constant coefficients and ι(r) = target by solving
/// the n² slot equations; lowest free unknowns are set to zero.
inline KoszulElement solve_homotopy_deg2(const KoszulElement& target,
                                         const LinearizedDifferential& eta) {
  if (target.degree() != 1) throw DimensionMismatch("degree-2 homotopy needs a degree-1 target");
  if (target.base() != eta.base()) throw BaseMismatch();
  const std::size_t n = target.rank();
  for (const auto& [w, v] : target.coeffs())
    if (!v.c0().is_zero())
      throw ConstantObstruction("slot e^" + std::to_string(w.front()) + " has constant term " +
                                v.c0().to_string());

  std::vector<Wedge> unknowns;
  for (std::size_t p = 1; p <= n; ++p)
    for (std::size_t q = p + 1; q <= n; ++q) unknowns.push_back({p, q});

  // Row (m−1)·n + l: slot m, component l of the linear part.
  //   ι(e^p∧e^q) = η^p e^q − η^q e^p
  const RatMatrix& N = eta.N();
  RatMatrix a(n * n, unknowns.size());
  RatVector b(n * n);
  for (std::size_t m = 1; m <= n; ++m) {
    const RatVector t = target.coefficient({m}).c();
    for (std::size_t l = 0; l < n; ++l) {
      const std::size_t row = (m - 1) * n + l;
      b[row] = t[l];
      for (std::size_t u = 0; u < unknowns.size(); ++u) {
        const std::size_t p = unknowns[u][0];
        const std::size_t q = unknowns[u][1];
        if (q == m) a(row, u) += N(p - 1, l);
        if (p == m) a(row, u) -= N(q - 1, l);
      }
    }
  }

  LinearSolution sol;
  try {
    sol = solve_general(a, b);
  } catch (const Inconsistent& e) {
    throw Obstructed(e.residual(), e.witness());
  }
  std::map<Wedge, Rational> values;
  for (std::size_t u = 0; u < unknowns.size(); ++u) values[unknowns[u]] = sol.particular[u];
  return KoszulElement::constant(2, target.base(), values);
}

}  // namespace ckls
