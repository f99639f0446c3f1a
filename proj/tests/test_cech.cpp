#include <gtest/gtest.h>

#include <cmath>

#include "ckls/cech.hpp"
#include "ckls/io.hpp"
#include "oracle.hpp"
#include "test_support.hpp"

namespace ckls {
namespace {

using testing::chart;
using testing::q;
using testing::toy_cover;
using testing::toy_data;
using testing::vec;

const FeatureMap kLine = affine_features(1);

Cover load_cover(const std::string& data, const std::string& cover) {
  const std::string dir = CKLS_DATA_DIR;
  auto base = io::load_dataset(dir + "/" + data, WeightPolicy::nonnegative);
  return io::cover_from_json(io::parse_json(io::read_file(dir + "/" + cover), cover),
                             std::move(base));
}

Cover obstructed_cover() {
  return Cover(toy_data(),
               {chart("U1", {1, 2, 3, 4}), chart("U2", {2, 3, 4, 5}), chart("U3", {1, 2, 3, 5})});
}

RatVector beta_of(const CocycleResult& r, const CellNames& names) {
  return detail::constant_part(r.cochain.beta.at(names));
}

TEST(FitAllCells, ToyCover) {
  const auto fits = fit_all_cells(toy_cover(), kLine, 2);
  ASSERT_EQ(fits.size(), 3u);
  EXPECT_EQ(fits.at({"U1"}).solution.a_hat, vec({"11/42", "50/21"}));
  EXPECT_EQ(fits.at({"U2"}).solution.a_hat, vec({"13/15", "26/15"}));
  const auto& pair = fits.at({"U1", "U2"});
  EXPECT_EQ(pair.solution.a_hat, vec({"13/14", "12/7"}));
  EXPECT_EQ(pair.cell.indices, (IndexSet{2, 3, 4}));
  EXPECT_EQ(pair.differential.N(), (RatMatrix{{12, 4}, {4, 6}}));
  EXPECT_EQ(pair.differential.base(), pair.solution.a_hat);
  EXPECT_EQ(fits.at({"U1"}).system.N(), (RatMatrix{{44, -4}, {-4, 8}}));
  EXPECT_EQ(fits.at({"U2"}).system.nu(), (RatVector{-78, -26}));
}

TEST(FitAllCells, SingleChartIsGlobalFit) {
  const auto fits = fit_all_cells(Cover::whole(toy_data()), kLine, 2);
  ASSERT_EQ(fits.size(), 1u);
  EXPECT_EQ(fits.at({"D"}).solution.a_hat, vec({"55/113", "306/113"}));
}

TEST(FitAllCells, SingularPairNamesTheCell) {
  try {
    fit_all_cells(load_cover("toy_dataset.json", "singular_triple_cover.json"), kLine, 2);
    FAIL() << "expected Singular";
  } catch (const Singular& e) {
    EXPECT_EQ(e.cell(), "U1|U3");
    EXPECT_EQ(e.rank(), 1u);
  }
}

TEST(FitAllCells, RejectsNonCover) {
  const Cover partial(toy_data(), {chart("U1", {1, 2}), chart("U2", {2, 3})});
  try {
    fit_all_cells(partial, kLine, 2);
    FAIL() << "expected NotACover";
  } catch (const NotACover& e) {
    EXPECT_EQ(e.missing(), (std::vector<std::size_t>{4, 5}));
  }
}

TEST(CanonicalAlpha, LinearFormAtFit) {
  const auto fits = fit_all_cells(toy_cover(), kLine, 1);
  const auto alpha = canonical_alpha(fits.at({"U1"}));
  const RatVector a = vec({"11/42", "50/21"});
  EXPECT_EQ(alpha.degree(), 0u);
  EXPECT_EQ(alpha.base(), a);
  EXPECT_EQ(alpha.coefficient({}), LinearizedElement(a, 0, a));
}

TEST(CechDeltaPair, ToyAndAntisymmetry) {
  const auto fits = fit_all_cells(toy_cover(), kLine, 1);
  const auto a1 = canonical_alpha(fits.at({"U1"}));
  const auto a2 = canonical_alpha(fits.at({"U2"}));
  const auto& pair = fits.at({"U1", "U2"});
  const auto d = cech_delta_pair(a1, a2, pair);
  EXPECT_EQ(d.base(), pair.solution.a_hat);
  EXPECT_EQ(d.coefficient({}).c(), vec({"127/210", "-68/105"}));
  EXPECT_TRUE(d.coefficient({}).c0().is_zero());
  EXPECT_EQ(cech_delta_pair(a2, a1, pair), Rational(-1) * d);
  EXPECT_TRUE(cech_delta_pair(a1, a1, pair).is_zero());
  EXPECT_THROW(cech_delta_pair(KoszulElement(2, 1, a1.base()), a2, pair), DimensionMismatch);
}

TEST(BuildZeroCocycle, ToyCover) {
  const auto r = build_zero_cocycle(toy_cover(), kLine);
  EXPECT_EQ(beta_of(r, {"U1", "U2"}), vec({"653/5880", "-107/588"}));
  EXPECT_EQ(r.report.pairs.at({"U1", "U2"}).delta(), vec({"127/210", "-68/105"}));
  EXPECT_TRUE(r.report.pairs.at({"U1", "U2"}).residual_zero());
  EXPECT_TRUE(r.report.triples.empty());
  EXPECT_TRUE(r.report.verified());
  EXPECT_FALSE(r.report.any_obstructed());
}

TEST(BuildZeroCocycle, SingleChartIsTriviallyVerified) {
  const auto r = build_zero_cocycle(Cover::whole(toy_data()), kLine);
  EXPECT_TRUE(r.cochain.beta.empty());
  EXPECT_TRUE(r.report.verified());
  const auto m = discrepancy_metrics(r.report, r.cochain);
  EXPECT_FALSE(m.delta);
  EXPECT_FALSE(m.beta);
  EXPECT_FALSE(m.defect);
}

TEST(BuildZeroCocycle, ObstructedTriple) {
  const auto r = build_zero_cocycle(obstructed_cover(), kLine);
  EXPECT_EQ(r.fits.at({"U3"}).solution.a_hat, vec({"9/19", "50/19"}));
  EXPECT_EQ(r.fits.at({"U1", "U3"}).solution.a_hat, vec({"-1/38", "31/19"}));
  EXPECT_EQ(beta_of(r, {"U1", "U3"}), vec({"1307/60648", "1069/15162"}));
  EXPECT_EQ(beta_of(r, {"U2", "U3"}), vec({"-101/1995", "467/1995"}));
  EXPECT_EQ(r.report.pairs.at({"U2", "U3"}).delta(), vec({"-112/285", "256/285"}));

  const CellNames triple{"U1", "U2", "U3"};
  EXPECT_EQ(r.fits.at(triple).cell.indices, (IndexSet{2, 3}));
  EXPECT_EQ(r.fits.at(triple).solution.a_hat, vec({"1/2", "3/2"}));
  const auto& t = r.report.triples.at(triple);
  EXPECT_EQ(t.defect_constant, vec({"6877/176890", "-6507/353780"}));
  EXPECT_EQ(t.outcome, TripleOutcome::constant_obstruction);
  EXPECT_FALSE(r.cochain.r.at(triple).has_value());
  EXPECT_TRUE(r.report.any_obstructed());
  EXPECT_FALSE(r.report.verified());
  for (const auto& [names, p] : r.report.pairs) EXPECT_TRUE(p.residual_zero()) << cell_key(names);
}

TEST(BuildZeroCocycle, MaxDegreeOneSkipsTriples) {
  const auto r = build_zero_cocycle(obstructed_cover(), kLine, 1);
  EXPECT_TRUE(r.report.triples.empty());
  EXPECT_TRUE(r.report.verified());
}

TEST(BuildZeroCocycle, StarCoverIsWitnessed) {
  const auto r = build_zero_cocycle(load_cover("star_dataset.json", "star_cover.json"), kLine);
  EXPECT_EQ(r.fits.at({"U1"}).solution.a_hat, vec({"6/13", "134/65"}));
  EXPECT_EQ(r.fits.at({"U3"}).solution.a_hat, vec({"-36/143", "265/143"}));
  EXPECT_EQ(beta_of(r, {"U1", "U2"}), vec({"73/1092", "-271/2730"}));
  EXPECT_EQ(beta_of(r, {"U1", "U3"}), vec({"-4/65", "9/1430"}));
  EXPECT_EQ(beta_of(r, {"U2", "U3"}), vec({"-701/5460", "317/3003"}));
  const CellNames triple{"U1", "U2", "U3"};
  const auto& t = r.report.triples.at(triple);
  EXPECT_TRUE(t.defect.is_zero());
  EXPECT_EQ(t.outcome, TripleOutcome::witnessed);
  ASSERT_TRUE(r.cochain.r.at(triple).has_value());
  EXPECT_TRUE(r.cochain.r.at(triple)->is_zero());
  EXPECT_TRUE(r.report.verified());
}

TEST(VerifyCocycle, PerturbedBetaLeavesEtaResidual) {
  auto r = build_zero_cocycle(toy_cover(), kLine);
  const CellNames pair{"U1", "U2"};
  const RatVector base = r.fits.at(pair).solution.a_hat;
  r.cochain.beta.at(pair) += KoszulElement::constant(1, base, {{{1}, 1}});
  const auto rep = verify_cocycle(r.cochain, r.fits);
  EXPECT_FALSE(rep.verified());
  // ι(e¹) = η¹ = first row of N
  EXPECT_EQ(rep.pairs.at(pair).residual.coefficient({}), LinearizedElement(base, 0, RatVector{12, 4}));
}

TEST(VerifyCocycle, CellBookkeeping) {
  const auto r = build_zero_cocycle(toy_cover(), kLine);
  auto missing = r.cochain;
  missing.beta.clear();
  EXPECT_THROW(verify_cocycle(missing, r.fits), CellMismatch);
  auto extra = r.cochain;
  extra.alpha.emplace(CellNames{"U9"}, r.cochain.alpha.at({"U1"}));
  EXPECT_THROW(verify_cocycle(extra, r.fits), CellMismatch);
  auto shifted = r.cochain;
  shifted.beta.at({"U1", "U2"}) = translate(shifted.beta.at({"U1", "U2"}), RatVector{0, 0});
  EXPECT_THROW(verify_cocycle(shifted, r.fits), BaseMismatch);
}

TEST(VerifyCocycle, TripleWitnessChecks) {
  auto r = build_zero_cocycle(load_cover("star_dataset.json", "star_cover.json"), kLine);
  const CellNames triple{"U1", "U2", "U3"};
  const RatVector base = r.fits.at(triple).solution.a_hat;
  r.cochain.r.at(triple) = KoszulElement::constant(2, base, {{{1, 2}, 1}});
  EXPECT_EQ(verify_cocycle(r.cochain, r.fits).triples.at(triple).outcome,
            TripleOutcome::residual_nonzero);
  r.cochain.r.at(triple) = std::nullopt;
  EXPECT_EQ(verify_cocycle(r.cochain, r.fits).triples.at(triple).outcome,
            TripleOutcome::missing_witness);
}

TEST(DiscrepancyMetrics, ToyBetaNorm) {
  const auto r = build_zero_cocycle(toy_cover(), kLine);
  const auto m = discrepancy_metrics(r.report, r.cochain);
  ASSERT_TRUE(m.beta);
  EXPECT_EQ(m.beta->count, 1u);
  EXPECT_NEAR(m.beta->max, std::hypot(653.0 / 5880, 107.0 / 588), 1e-12);
  EXPECT_NEAR(m.beta->max, 0.2132, 1e-4);
  EXPECT_NEAR(m.delta->max, std::hypot(127.0 / 210, 68.0 / 105), 1e-12);
  EXPECT_FALSE(m.defect);
}

TEST(Rigidity, BetaIsInverseNormalTimesDelta) {
  const auto r = build_zero_cocycle(obstructed_cover(), kLine);
  for (const auto& [names, beta] : r.cochain.beta) {
    const auto& fit = r.fits.at(names);
    const RatVector delta = r.report.pairs.at(names).delta();
    EXPECT_EQ(detail::constant_part(beta), mat_inverse(fit.system.N().transpose()) * delta);
    // the linear part of ι(β) pins β; no constant ambiguity survives
    EXPECT_EQ(fit.system.N().transpose() * detail::constant_part(beta), delta);
  }
}

// Random 1-d data with two or three random charts plus a chart Z on
// everything; every chart holds points 1 and 2, whose abscissae differ, so no
// cell is singular.
Cover random_cover(testing::Random& rng) {
  const std::size_t n = static_cast<std::size_t>(rng.integer(5, 9));
  std::vector<WeightedPoint> pts;
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back({RatVector{Rational(static_cast<long>(i) - 3)}, rng.rational(), rng.integer(1, 3)});
  WeightedDataSet data(1, std::move(pts));
  const std::size_t k = static_cast<std::size_t>(rng.integer(2, 3));
  std::vector<Chart> charts;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::size_t> idx{1, 2};
    for (std::size_t i = 3; i <= n; ++i)
      if (rng.coin()) idx.push_back(i);
    charts.push_back(chart("C" + std::to_string(c), idx));
  }
  charts.push_back(chart("Z", [&] {
    std::vector<std::size_t> all;
    for (std::size_t i = 1; i <= n; ++i) all.push_back(i);
    return all;
  }()));
  return Cover(std::move(data), std::move(charts));
}

TEST(BuildZeroCocycle, RandomCoversAgainstOracle) {
  testing::Random rng(31);
  for (int t = 0; t < 40; ++t) {
    const Cover cover = random_cover(rng);
    const auto r = build_zero_cocycle(cover, kLine);
    for (const auto& [names, fit] : r.fits) {
      const auto expected = oracle::affine_fit(cover.base(), fit.cell.indices);
      ASSERT_TRUE(expected);
      EXPECT_EQ(fit.solution.a_hat, RatVector(*expected));
    }
    for (const auto& [names, p] : r.report.pairs) EXPECT_TRUE(p.residual_zero());
    for (const auto& [names, tr] : r.report.triples) {
      const RatVector c = beta_of(r, {names[1], names[2]}) - beta_of(r, {names[0], names[2]}) +
                          beta_of(r, {names[0], names[1]});
      EXPECT_EQ(tr.defect_constant, c);
      EXPECT_EQ(tr.outcome, c.is_zero() ? TripleOutcome::witnessed
                                        : TripleOutcome::constant_obstruction);
    }
  }
}

}  // namespace
}  // namespace ckls
