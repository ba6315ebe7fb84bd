#include <doctest.h>

#include "sepvar/kset.hpp"
#include "sepvar/samples.hpp"
#include "test_support.hpp"

using namespace sepvar;
using namespace sepvar::testing;

namespace {

FiberPoly zz(int dim = 1) { return FiberPoly::zeta(dim, 0) * FiberPoly::zetabar(dim, 0); }

JetMatrix<Scalar> constant_matrix(Scalar c) { return {{JetSeries::constant(1, kExact, c)}}; }

bool zeta_zetabar_support(const FiberPoly& k) {
  for (const auto& [m, c] : k.terms())
    if (m.holo_degree() == 0 || m.anti_degree() == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("solve_K flat and K_3") {
  Geometry flat = preset_geometry("flat", 8).geometry;
  KElement k = solve_K(flat, 8);
  CHECK(k.value.equals(zz()));
  CHECK(k.value.jet_order() == kExact);
  CHECK(k.value.fiber_order() == 8);

  Geometry flat2 = preset_geometry("flat", 8, 0, 2).geometry;
  CHECK(solve_K(flat2, 6).value.equals(zz(2) + FiberPoly::zeta(2, 1) * FiberPoly::zetabar(2, 1)));

  for (const char* name : {"disc", "fubini-study"}) {
    KElement kd = solve_K(preset_geometry(name, 12).geometry, 5);
    CHECK(kd.value.homogeneous(3).is_zero());
    CHECK(kd.value.homogeneous(5).is_zero());
    CHECK(kd.value.homogeneous(4).jet_order() >= 0);
  }
  Geometry g2 = metric_from_potential(curved_potential(10));
  FiberPoly k2 = solve_K(g2, 4).value;
  CHECK(k2.homogeneous(3).is_zero());
  CHECK_FALSE(k2.homogeneous(4).is_zero());
}

TEST_CASE("solve_K structure: K_2, evenness and zeta-zetabar support") {
  std::vector<Geometry> geoms = {preset_geometry("disc", 14).geometry, preset_geometry("fubini-study", 14).geometry,
                                 metric_from_potential(curved_potential(10))};
  for (const auto& g : geoms) {
    int n = g.dim() == 1 ? 6 : 4;
    FiberPoly k = solve_K(g, n).value;
    FiberPoly k2(g.dim(), kExact, kExact);
    for (int l = 0; l < g.dim(); ++l)
      for (int j = 0; j < g.dim(); ++j) k2 += g.g(l, j) * (FiberPoly::zeta(g.dim(), j) * FiberPoly::zetabar(g.dim(), l));
    CHECK(k.homogeneous(2).equals(k2));
    for (int d = 3; d <= n; d += 2) CHECK(k.homogeneous(d).is_zero());
    CHECK(zeta_zetabar_support(k));
  }
}

TEST_CASE("solve_K rejects tensors violating Jacobi and insufficient jets") {
  JetMatrix<Scalar> bad = {{one(2), jet(2, kExact, {{{0, 2}, {0, 0}, 1}})}, {JetSeries(2, kExact), one(2)}};
  CHECK_THROWS_WITH_AS(solve_K(Geometry(bad, false), 4), doctest::Contains("InconsistentRecursion"), Error);
  CHECK_THROWS_WITH_AS(solve_K(preset_geometry("disc", 3).geometry, 6), doctest::Contains("TruncationInsufficient"),
                       Error);
}

TEST_CASE("solve_F") {
  Geometry disc = preset_geometry("disc", 14).geometry;
  JetMatrix<Scalar> zero{{JetSeries(1, kExact)}};
  FElement f0 = solve_F(DeformedGeometry(disc, zero), 6);
  CHECK(f0.j().is_zero());
  CHECK(f0.k().equals(solve_K(disc, 6).value));

  FElement fc = solve_F(DeformedGeometry(Geometry(constant_matrix(2)), constant_matrix(q(-3, 4))), 6);
  DualFiber expected = DualJet::constant(1, kExact, Dual(Scalar(2), q(-3, 4))) * lift(zz());
  CHECK(fc.value.equals(expected));

  DeformedGeometry d = h_from_psi(disc, disc_potential(16));
  FElement f = solve_F(d, 6);
  CHECK(f.k().equals(solve_K(disc, 6).value));
  CHECK(f.j().homogeneous(2).equals(d.h(0, 0) * zz()));
  CHECK(f.j().homogeneous(3).is_zero());
  CHECK(f.j().homogeneous(5).is_zero());
  CHECK(zeta_zetabar_support(f.j()));
}

TEST_CASE("membership_report") {
  for (int d = 1; d <= 3; ++d) CHECK(membership_report(zz(), d).pass);

  FiberPoly wrong = zz() + zz() * zz();
  auto rep = membership_report(wrong, 2);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.failures().empty());

  CHECK_THROWS_WITH_AS(membership_report(FiberPoly::zeta(1, 0) + zz(), 2), doctest::Contains("FiberDegreeTooLow"),
                       Error);

  for (const char* name : {"disc", "fubini-study"}) {
    KElement k = solve_K(preset_geometry(name, 24).geometry, 6);
    auto r = membership_report(k.value, 3);
    CHECK(r.pass);
    CHECK(r.fiber_order == 4);
    CHECK(r.rows.size() == 18);
  }
  Geometry disc = preset_geometry("disc", 24).geometry;
  FElement f = solve_F(h_from_psi(disc, disc_potential(26)), 6);
  CHECK(membership_report(f.value, 3).pass);

  // A degree-4 perturbation of the solver output is detected.
  KElement k = solve_K(disc, 6);
  auto perturbed = membership_report(k.value + q(1, 7) * (zz() * zz()).truncated_fiber(6), 3);
  CHECK_FALSE(perturbed.pass);
}

TEST_CASE("st_from_element") {
  JetSeries z = JetSeries::z(1, 0), zb = JetSeries::zbar(1, 0);
  FiberPoly kflat = zz().truncated_fiber(6);
  FiberPoly s = st_from_element(kflat, z, zb, Side::source);
  CHECK(s.equals(z * (FiberPoly::lift(zb) + FiberPoly::zeta(1, 0))));
  FiberPoly t = st_from_element(kflat, z, zb, Side::target);
  CHECK(t.equals(zb * (FiberPoly::lift(z) + FiberPoly::zetabar(1, 0))));

  KElement kd = solve_K(preset_geometry("disc", 24).geometry, 6);
  CHECK(st_from_element(kd.value, one(), zb * zb, Side::source)
            .equals(ham_exp(kd.value, FiberPoly::lift(zb * zb), 6)));

  CHECK_THROWS_WITH_AS(st_from_element(kflat, zb, zb, Side::source), doctest::Contains("PurityViolation"), Error);
  CHECK_THROWS_WITH_AS(st_from_element(kflat, z, z, Side::source), doctest::Contains("PurityViolation"), Error);

  Geometry disc = preset_geometry("disc", 24).geometry;
  SampleGenerator gen(5);
  for (int i = 0; i < 3; ++i) {
    JetSeries u = gen.polynomial(1, 3, kExact, 4);
    for (Side side : {Side::source, Side::target}) {
      FiberPoly via_k = st_apply(kd.value, u, side);
      CHECK(via_k.fiber_order() == 5);
      CHECK(via_k.equals(source_target_exp(disc, u, side, 5)));
    }
  }
}

TEST_CASE("maps built from K and F satisfy the groupoid axioms") {
  Geometry disc = preset_geometry("disc", 18).geometry;
  DeformedGeometry d = h_from_psi(disc, disc_potential(20));
  FElement f = solve_F(d, 5);
  SampleGenerator gen(77);
  std::vector<std::pair<JetSeries, JetSeries>> samples;
  for (int i = 0; i < 2; ++i) samples.emplace_back(gen.polynomial(1, 3, kExact, 3), gen.polynomial(1, 3, kExact, 3));
  auto rep = verify_axioms(make_map(f, Side::source), make_map(f, Side::target), d, samples);
  CHECK(rep.pass);
  for (const auto& row : rep.failures()) MESSAGE(row.axiom << ": " << row.residual);

  auto recovered = std::get<DeformedGeometry>(recover_tensors(make_map(f, Side::source)));
  CHECK(recovered.h(0, 0).equals(d.h(0, 0)));
  CHECK(recovered.base().g(0, 0).equals(disc.g(0, 0)));
}

TEST_CASE("deformation_from_hamiltonian") {
  JetSeries zb = JetSeries::zbar(1, 0);
  Geometry disc = preset_geometry("disc", 24).geometry;
  KElement kd = solve_K(disc, 6);
  CHECK(deformation_from_hamiltonian(kd, FiberPoly(1, kExact, 6), zb * zb, Side::source).is_zero());

  KElement kc = solve_K(Geometry(constant_matrix(2)), 6);
  FiberPoly j = JetSeries::constant(1, kExact, q(5)) * zz();
  CHECK(deformation_from_hamiltonian(kc, j, zb, Side::source)
            .equals(JetSeries::constant(1, kExact, q(5)) * FiberPoly::zeta(1, 0)));

  DeformedGeometry d = h_from_psi(disc, disc_potential(26));
  FElement f = solve_F(d, 6);
  SampleGenerator gen(19);
  for (int i = 0; i < 3; ++i) {
    JetSeries u = gen.polynomial(1, 3, kExact, 4);
    for (Side side : {Side::source, Side::target}) {
      FiberPoly s1 = deformation_from_hamiltonian(kd, f.j(), u, side);
      CHECK(s1.equals(soul(st_apply(f.value, lift(u), side))));
      CHECK(s1.equals(soul(deformed_source_target(d, u, side, 5))));
    }
  }

  CHECK_THROWS_WITH_AS(deformation_from_hamiltonian(kd, FiberPoly::zeta(1, 0), zb, Side::source),
                       doctest::Contains("FiberDegreeTooLow"), Error);
}
