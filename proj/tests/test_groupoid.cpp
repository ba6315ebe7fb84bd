#include <doctest.h>

#include "sepvar/groupoid.hpp"
#include "sepvar/samples.hpp"
#include "test_support.hpp"

using namespace sepvar;
using namespace sepvar::testing;

namespace {

JetMatrix<Scalar> constant_matrix(Scalar c) { return {{JetSeries::constant(1, kExact, c)}}; }

DeformedGeometry disc_deformed(int order) {
  Geometry g = preset_geometry("disc", order).geometry;
  return h_from_psi(g, disc_potential(order + 2));
}

}  // namespace

TEST_CASE("source_target_exp examples") {
  Geometry flat = preset_geometry("flat", 8).geometry;
  JetSeries zb = JetSeries::zbar(1, 0);
  FiberPoly shifted = FiberPoly::lift(zb) + FiberPoly::zeta(1, 0);
  CHECK(source_target_exp(flat, zb * zb, Side::source, 4).equals(shifted * shifted));

  JetSeries z = JetSeries::z(1, 0);
  FiberPoly tz = FiberPoly::lift(z) + FiberPoly::zetabar(1, 0);
  CHECK(source_target_exp(flat, z * z * zb, Side::target, 4).equals(tz * tz * FiberPoly::lift(zb)));

  Geometry disc = preset_geometry("disc", 10).geometry;
  JetSeries a = jet(1, 10, {{{3}, {0}, 2}, {{1}, {0}, -1}});
  CHECK(source_target_exp(disc, a, Side::source, 4).equals(FiberPoly::lift(a)));
  CHECK(source_target_exp(disc, a.swapped(), Side::target, 4).equals(FiberPoly::lift(a.swapped())));

  // z + zeta (1 - z zbar)^2 - z zeta^2 (1 - z zbar)^3, expanded by hand.
  JetSeries w = jet(1, 10, {{{0}, {0}, 1}, {{1}, {1}, -1}});
  FiberPoly expected = FiberPoly::lift(zb) + (w * w) * FiberPoly::zeta(1, 0) -
                       (z * w * w * w) * (FiberPoly::zeta(1, 0) * FiberPoly::zeta(1, 0));
  FiberPoly got = source_target_exp(disc, zb, Side::source, 2);
  CHECK(got.fiber_order() == 2);
  CHECK(got.equals(expected));
  CHECK(got.jet_order() >= 8);
}

TEST_CASE("source_target_exp runs out of jet order") {
  Geometry disc = preset_geometry("disc", 2).geometry;
  CHECK_THROWS_WITH_AS(source_target_exp(disc, JetSeries::zbar(1, 0) * JetSeries::zbar(1, 0), Side::source, 6),
                       doctest::Contains("TruncationInsufficient"), Error);
}

TEST_CASE("deformed_source_target") {
  DeformedGeometry d(Geometry(constant_matrix(2)), constant_matrix(3));
  JetSeries zb = JetSeries::zbar(1, 0);
  DualFiber s = deformed_source_target(d, zb, Side::source, 4);
  DualFiber expected = lift(FiberPoly::lift(zb)) + DualJet::constant(1, kExact, Dual(Scalar(2), Scalar(3))) *
                                                       DualFiber::zeta(1, 0);
  CHECK(s.equals(expected));

  DeformedGeometry dd = disc_deformed(12);
  JetSeries a = jet(1, 12, {{{2}, {0}, 1}, {{1}, {0}, 5}});
  DualFiber sa = deformed_source_target(dd, a, Side::source, 4);
  CHECK(body(sa).equals(FiberPoly::lift(a)));
  CHECK(soul(sa).is_zero());

  SampleGenerator gen(7);
  for (int i = 0; i < 3; ++i) {
    JetSeries f = gen.polynomial(1, 3, kExact);
    for (Side side : {Side::source, Side::target}) {
      DualFiber sf = deformed_source_target(dd, f, side, 4);
      CHECK(body(sf).equals(source_target_exp(dd.base(), f, side, 4)));
      CHECK(soul(sf).equals(s1_via_ad_series(dd, f, side, 4)));
    }
  }
}

TEST_CASE("s1_via_ad_series") {
  Geometry disc = preset_geometry("disc", 10).geometry;
  JetMatrix<Scalar> zero{{JetSeries(1, kExact)}};
  JetSeries zb = JetSeries::zbar(1, 0);
  CHECK(s1_via_ad_series(DeformedGeometry(disc, zero), zb * zb, Side::source, 4).is_zero());

  DeformedGeometry c(Geometry(constant_matrix(2)), constant_matrix(q(-5, 3)));
  CHECK(s1_via_ad_series(c, zb, Side::source, 4).equals(JetSeries::constant(1, kExact, q(-5, 3)) * FiberPoly::zeta(1, 0)));

  DeformedGeometry dd = disc_deformed(12);
  CHECK(s1_via_ad_series(dd, zb, Side::source, 3).equals(soul(deformed_source_target(dd, zb, Side::source, 3))));
}

TEST_CASE("s1_via_potential") {
  Geometry disc = preset_geometry("disc", 10).geometry;
  JetSeries zb = JetSeries::zbar(1, 0);
  CHECK(s1_via_potential(disc, JetSeries::constant(1, kExact, q(7)), zb * zb, Side::source, 4).is_zero());
  JetSeries hol = jet(1, kExact, {{{2}, {0}, 3}, {{1}, {0}, 1}});
  CHECK(s1_via_potential(disc, hol, zb * zb, Side::source, 4).is_zero());

  Geometry flat = preset_geometry("flat", 8).geometry;
  JetSeries zzb = jet(1, kExact, {{{1}, {1}, 1}});
  CHECK(s1_via_potential(flat, zzb, zb, Side::source, 4).equals(-FiberPoly::zeta(1, 0)));
  DeformedGeometry d = h_from_psi(flat, zzb);
  CHECK(soul(deformed_source_target(d, zb, Side::source, 4)).equals(-FiberPoly::zeta(1, 0)));
}

TEST_CASE("the three S_1 constructions agree") {
  SampleGenerator gen(13);
  const int m = 12, n = 4;
  std::vector<Geometry> geoms = {preset_geometry("disc", m).geometry, preset_geometry("fubini-study", m).geometry,
                                 metric_from_potential(curved_potential(8))};
  for (const auto& g : geoms) {
    int dim = g.dim();
    for (int trial = 0; trial < 2; ++trial) {
      JetSeries psi = gen.polynomial(dim, 4, kExact, 4);
      DeformedGeometry d = h_from_psi(g, psi);
      JetSeries f = gen.polynomial(dim, 3, kExact, 3);
      for (Side side : {Side::source, Side::target}) {
        FiberPoly pot = s1_via_potential(g, psi, f, side, n);
        CHECK(pot.equals(s1_via_ad_series(d, f, side, n)));
        CHECK(pot.equals(soul(deformed_source_target(d, f, side, n))));
      }
    }
  }
}

TEST_CASE("D^p S_0 of the potential gradient is the identity") {
  PotentialData pot = curved_potential(9);
  Geometry g = metric_from_potential(pot);
  for (int k = 0; k < 2; ++k) {
    FiberPoly s = source_target_exp(g, pot.phi_minus1.d_holo(k), Side::source, 4);
    for (int p = 0; p < 2; ++p) {
      FiberPoly dp(2, kExact, kExact);
      for (int l = 0; l < 2; ++l) dp += g.g(l, p) * s.d_base(kMaxDim + l);
      CHECK(dp.equals(FiberPoly::lift(JetSeries::constant(2, kExact, Scalar(p == k ? 1 : 0)))));
    }
  }
}

TEST_CASE("recover_tensors") {
  Geometry flat = preset_geometry("flat", 8).geometry;
  auto r = recover_tensors(make_map(flat, Side::source, 3));
  REQUIRE(std::holds_alternative<Geometry>(r));
  CHECK(std::get<Geometry>(r).g(0, 0).equals(one()));

  Geometry disc = preset_geometry("disc", 10).geometry;
  JetSeries w = jet(1, 10, {{{0}, {0}, 1}, {{1}, {1}, -1}});
  for (Side side : {Side::source, Side::target}) {
    auto rd = recover_tensors(make_map(disc, side, 3));
    CHECK(std::get<Geometry>(rd).g(0, 0).equals(w * w));
  }

  DeformedGeometry df = h_from_psi(flat, jet(1, kExact, {{{1}, {1}, 1}}));
  auto rf = recover_tensors(make_map(df, Side::source, 3));
  REQUIRE(std::holds_alternative<DeformedGeometry>(rf));
  CHECK(std::get<DeformedGeometry>(rf).h(0, 0).equals(JetSeries::constant(1, kExact, Scalar(-1))));

  Geometry g2 = metric_from_potential(curved_potential(8));
  SampleGenerator gen(3);
  DeformedGeometry d2 = h_from_psi(g2, gen.polynomial(2, 4, kExact));
  for (Side side : {Side::source, Side::target}) {
    auto back = std::get<DeformedGeometry>(recover_tensors(make_map(d2, side, 3)));
    for (int l = 0; l < 2; ++l)
      for (int k = 0; k < 2; ++k) {
        CHECK(back.base().g(l, k).equals(g2.g(l, k)));
        CHECK(back.h(l, k).equals(d2.h(l, k)));
        CHECK(back.h(l, k).order() >= 3);
      }
  }
}

TEST_CASE("verify_axioms") {
  Geometry flat = preset_geometry("flat", 8).geometry;
  JetMatrix<Scalar> zero{{JetSeries(1, kExact)}};
  DeformedGeometry df(flat, zero);
  JetSeries zb = JetSeries::zbar(1, 0);
  auto rep = verify_axioms(make_map(flat, Side::source, 4), make_map(flat, Side::target, 4), df, {{zb, zb * zb}});
  CHECK(rep.pass);
  CHECK(rep.rows.size() == 7);

  SampleGenerator gen(99);
  std::vector<std::pair<JetSeries, JetSeries>> samples;
  for (int i = 0; i < 3; ++i) samples.emplace_back(gen.polynomial(1, 3, kExact, 3), gen.polynomial(1, 3, kExact, 3));

  DeformedGeometry dd = disc_deformed(14);
  SourceTargetMap s = make_map(dd, Side::source, 4), t = make_map(dd, Side::target, 4);
  auto good = verify_axioms(s, t, dd, samples);
  CHECK(good.pass);
  for (const auto& row : good.failures()) MESSAGE(row.axiom << " " << row.residual);

  SourceTargetMap corrupted = s;
  corrupted.eval = [s](const JetSeries& f) {
    return s(f) + make_dual(FiberPoly(1, kExact, kExact), FiberPoly::zeta(1, 0) * FiberPoly::zeta(1, 0));
  };
  auto bad = verify_axioms(corrupted, t, dd, samples);
  CHECK_FALSE(bad.pass);
  bool product_failed = false;
  for (const auto& row : bad.failures()) product_failed = product_failed || row.axiom == "source product";
  CHECK(product_failed);

  Geometry g2 = metric_from_potential(curved_potential(8));
  DeformedGeometry d2 = h_from_psi(g2, gen.polynomial(2, 4, kExact));
  std::vector<std::pair<JetSeries, JetSeries>> samples2;
  for (int i = 0; i < 2; ++i) samples2.emplace_back(gen.polynomial(2, 2, kExact, 3), gen.polynomial(2, 2, kExact, 3));
  CHECK(verify_axioms(make_map(d2, Side::source, 3), make_map(d2, Side::target, 3), d2, samples2).pass);
}
