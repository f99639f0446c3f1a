#pragma once

// Total-degree-0 cochains of the Čech–Koszul complex over a cover: local
// fits α_i on charts, degree-1 witnesses β_ij on pairwise overlaps and
// degree-2 witnesses r_ijk on triple overlaps, with the exact verifier.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ckls/dataset.hpp"
#include "ckls/error.hpp"
#include "ckls/koszul.hpp"
#include "ckls/linalg.hpp"
#include "ckls/model.hpp"

namespace ckls {

/// Sorted chart names of a nerve cell.
using CellNames = std::vector<std::string>;

inline std::string cell_key(const CellNames& names) {
  std::string s;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) s += "|";
    s += names[i];
  }
  return s;
}

struct ChartFit {
  NerveCell cell;
  NormalSystem system;  // at the cell's weights
  LSSolution solution;
  LinearizedDifferential differential;
};

using FitMap = std::map<CellNames, ChartFit>;

inline FitMap fit_all_cells(const Cover& cover, const FeatureMap& features,
                            std::size_t max_degree) {
  validate_cover(cover);
  const NormalSystem full = build_normal_system(cover.base(), features);
  FitMap fits;
  for (auto& cell : enumerate_nerve(cover, max_degree)) {
    NormalSystem local = full.restricted(cell.indices);
    LSSolution sol = solve_least_squares(local, cell.key());
    LinearizedDifferential diff(sol.a_hat, local.N());
    CellNames names = cell.chart_names;
    fits.emplace(std::move(names),
                 ChartFit{std::move(cell), std::move(local), std::move(sol), std::move(diff)});
  }
  return fits;
}

/// α = 𝔞ᵀ(a − 𝔞).
inline KoszulElement canonical_alpha(const ChartFit& fit) {
  const RatVector& a = fit.solution.a_hat;
  KoszulElement alpha(a.dim(), 0, a);
  alpha.set({}, LinearizedElement(a, 0, a));
  return alpha;
}

/// τ(α_j|) − τ(α_i|) at the pair's base.
inline KoszulElement cech_delta_pair(const KoszulElement& alpha_i, const KoszulElement& alpha_j,
                                     const ChartFit& pair) {
  if (alpha_i.degree() != 0 || alpha_j.degree() != 0)
    throw DimensionMismatch("Čech difference of pairs takes degree-0 elements");
  if (alpha_i.rank() != alpha_j.rank()) throw BaseMismatch();
  const RatVector& base = pair.solution.a_hat;
  return translate(alpha_j, base) - translate(alpha_i, base);
}

/// β_jk − β_ik + β_ij, each translated to the triple's base.
inline KoszulElement cech_defect_triple(const KoszulElement& beta_jk, const KoszulElement& beta_ik,
                                        const KoszulElement& beta_ij, const ChartFit& triple) {
  const RatVector& base = triple.solution.a_hat;
  return translate(beta_jk, base) - translate(beta_ik, base) + translate(beta_ij, base);
}

struct TotalCochain {
  std::map<CellNames, KoszulElement> alpha;                // degree 0 on charts
  std::map<CellNames, KoszulElement> beta;                 // degree 1 on pairs
  std::map<CellNames, std::optional<KoszulElement>> r;     // degree 2 on triples; nullopt = none found
};

struct PairReport {
  KoszulElement target;    // τ(α_j) − τ(α_i)
  KoszulElement residual;  // ι(β) − target

  RatVector delta() const { return target.coefficient({}).c(); }
  bool residual_zero() const { return residual.is_zero(); }
};

enum class TripleOutcome {
  witnessed,             // ι(r) = defect exactly
  residual_nonzero,      // r given but ι(r) ≠ defect
  constant_obstruction,  // defect has a constant part; no r can exist
  linear_obstruction,    // constant part vanishes but the slot equations are inconsistent
  missing_witness,       // no r supplied although one would exist
};

inline const char* to_string(TripleOutcome o) {
  switch (o) {
    case TripleOutcome::witnessed: return "witnessed";
    case TripleOutcome::residual_nonzero: return "residual_nonzero";
    case TripleOutcome::constant_obstruction: return "constant_obstruction";
    case TripleOutcome::linear_obstruction: return "linear_obstruction";
    case TripleOutcome::missing_witness: return "missing_witness";
  }
  return "unknown";
}

struct TripleReport {
  KoszulElement defect;                   // degree 1, at the triple's base
  RatVector defect_constant;              // constant part per slot e^1..e^n
  std::optional<KoszulElement> residual;  // ι(r) − defect, when r is present
  TripleOutcome outcome = TripleOutcome::witnessed;

  bool obstructed() const {
    return outcome == TripleOutcome::constant_obstruction ||
           outcome == TripleOutcome::linear_obstruction;
  }
  bool residual_zero() const { return residual && residual->is_zero(); }
};

struct ObstructionReport {
  std::map<CellNames, PairReport> pairs;
  std::map<CellNames, TripleReport> triples;

  bool any_obstructed() const {
    return std::any_of(triples.begin(), triples.end(),
                       [](const auto& kv) { return kv.second.obstructed(); });
  }
  /// Every supplied equation holds exactly.
  bool verified() const {
    for (const auto& [k, p] : pairs)
      if (!p.residual_zero()) return false;
    for (const auto& [k, t] : triples)
      if (t.outcome != TripleOutcome::witnessed) return false;
    return true;
  }
};

namespace detail {

inline RatVector constant_part(const KoszulElement& xi) {
  RatVector out(xi.rank());
  for (const auto& [w, v] : xi.coeffs())
    if (w.size() == 1) out[w.front() - 1] = v.c0();
  return out;
}

inline bool has_constant_part(const KoszulElement& xi) {
  for (const auto& [w, v] : xi.coeffs())
    if (!v.c0().is_zero()) return true;
  return false;
}

inline CellNames drop(const CellNames& names, std::size_t k) {
  CellNames out;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (i != k) out.push_back(names[i]);
  return out;
}

template <class Map>
void require_cells(const Map& supplied, const FitMap& fits, std::size_t degree, bool complete,
                   const char* what) {
  for (const auto& [names, _] : supplied) {
    auto it = fits.find(names);
    if (it == fits.end() || names.size() != degree + 1)
      throw CellMismatch(std::string(what) + " on unknown cell " + cell_key(names));
  }
  if (!complete) return;
  for (const auto& [names, fit] : fits)
    if (names.size() == degree + 1 && !supplied.contains(names))
      throw CellMismatch(std::string("missing ") + what + " on cell " + cell_key(names));
}

}  // namespace detail

/// Checks exactly, for each supplied level:
///   pairs:   ι(β_ij) = τ(α_j) − τ(α_i)
///   triples: ι(r_ijk) = τ(β_jk) − τ(β_ik) + τ(β_ij)
/// Alphas and betas must be present on every chart and pair of `fits`;
/// triples are checked only when the cochain supplies any.
inline ObstructionReport verify_cocycle(const TotalCochain& cochain, const FitMap& fits) {
  detail::require_cells(cochain.alpha, fits, 0, true, "alpha");
  detail::require_cells(cochain.beta, fits, 1, true, "beta");
  detail::require_cells(cochain.r, fits, 2, !cochain.r.empty(), "r");

  ObstructionReport report;
  for (const auto& [names, beta] : cochain.beta) {
    const ChartFit& fit = fits.at(names);
    KoszulElement target =
        cech_delta_pair(cochain.alpha.at({names[0]}), cochain.alpha.at({names[1]}), fit);
    KoszulElement residual = koszul_diff(beta, fit.differential) - target;
    report.pairs.emplace(names, PairReport{std::move(target), std::move(residual)});
  }

  for (const auto& [names, r] : cochain.r) {
    const ChartFit& fit = fits.at(names);
    // faces: drop i -> (j,k), drop j -> (i,k), drop k -> (i,j)
    KoszulElement defect = cech_defect_triple(cochain.beta.at(detail::drop(names, 0)),
                                              cochain.beta.at(detail::drop(names, 1)),
                                              cochain.beta.at(detail::drop(names, 2)), fit);
    TripleReport t{defect, detail::constant_part(defect), std::nullopt, TripleOutcome::witnessed};
    if (r) {
      t.residual = koszul_diff(*r, fit.differential) - defect;
      if (!t.residual->is_zero()) t.outcome = TripleOutcome::residual_nonzero;
    } else if (detail::has_constant_part(defect)) {
      t.outcome = TripleOutcome::constant_obstruction;
    } else {
      try {
        solve_homotopy_deg2(defect, fit.differential);
        t.outcome = TripleOutcome::missing_witness;
      } catch (const Obstructed&) {
        t.outcome = TripleOutcome::linear_obstruction;
      }
    }
    report.triples.emplace(names, std::move(t));
  }
  return report;
}

struct CocycleResult {
  FitMap fits;
  TotalCochain cochain;
  ObstructionReport report;
};

/// Builds α on every chart, β = homotopy witness on every pair, and r on every
/// triple whose defect admits one. Singular cells propagate; obstructed
/// triples are recorded with r = nullopt.
inline CocycleResult build_zero_cocycle(const Cover& cover, const FeatureMap& features,
                                        std::size_t max_degree = 2) {
  CocycleResult out;
  out.fits = fit_all_cells(cover, features, std::min<std::size_t>(max_degree, 2));
  TotalCochain& c = out.cochain;

  for (const auto& [names, fit] : out.fits)
    if (names.size() == 1) c.alpha.emplace(names, canonical_alpha(fit));

  for (const auto& [names, fit] : out.fits) {
    if (names.size() != 2) continue;
    const KoszulElement target =
        cech_delta_pair(c.alpha.at({names[0]}), c.alpha.at({names[1]}), fit);
    c.beta.emplace(names, solve_homotopy_deg1(target, fit.differential));
  }

  for (const auto& [names, fit] : out.fits) {
    if (names.size() != 3) continue;
    const KoszulElement defect =
        cech_defect_triple(c.beta.at(detail::drop(names, 0)), c.beta.at(detail::drop(names, 1)),
                           c.beta.at(detail::drop(names, 2)), fit);
    std::optional<KoszulElement> r;
    if (!detail::has_constant_part(defect)) {
      try {
        r = solve_homotopy_deg2(defect, fit.differential);
      } catch (const Obstructed&) {
      }
    }
    c.r.emplace(names, std::move(r));
  }

  out.report = verify_cocycle(c, out.fits);
  return out;
}

struct NormStats {
  double max = 0;
  double mean = 0;
  std::size_t count = 0;
};

struct DiscrepancyMetrics {
  std::optional<NormStats> delta;   // ‖δ_ij‖₂ over pairs
  std::optional<NormStats> beta;    // ‖β_ij‖₂ over pairs (constant parts)
  std::optional<NormStats> defect;  // ‖c_ijk‖₂ over triples
};

namespace detail {

inline std::optional<NormStats> stats(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  NormStats s;
  s.count = values.size();
  double sum = 0;
  for (double v : values) {
    s.max = std::max(s.max, v);
    sum += v;
  }
  s.mean = sum / static_cast<double>(values.size());
  return s;
}

}  // namespace detail

/// Float summaries for triage; the exact data stays in the report.
inline DiscrepancyMetrics discrepancy_metrics(const ObstructionReport& report,
                                              const TotalCochain& cochain) {
  std::vector<double> deltas, betas, defects;
  for (const auto& [names, p] : report.pairs) {
    deltas.push_back(p.delta().norm2());
    if (auto it = cochain.beta.find(names); it != cochain.beta.end())
      betas.push_back(detail::constant_part(it->second).norm2());
  }
  for (const auto& [names, t] : report.triples) defects.push_back(t.defect_constant.norm2());
  return {detail::stats(deltas), detail::stats(betas), detail::stats(defects)};
}

}  // namespace ckls
