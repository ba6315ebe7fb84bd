#include <doctest.h>

#include "sepvar/groupoid.hpp"
#include "sepvar/kset.hpp"
#include "sepvar/samples.hpp"
#include "sepvar/starprod.hpp"
#include "test_support.hpp"

using namespace sepvar;
using namespace sepvar::testing;

namespace {

PotentialData flat_potential(int dim = 1) { return preset_geometry("flat", 0, 0, dim).potential; }

long factorial(int r) {
  long f = 1;
  for (int i = 2; i <= r; ++i) f *= i;
  return f;
}

// sum_r nu^r / r! (dbar^r f) d^r in one variable
DiffOp flat_left_closed_form(const JetSeries& f, int nu_order) {
  DiffOp op(1, nu_order);
  for (int r = 0; r <= nu_order; ++r)
    op.add_term(r, MultiIndex::unit_holo(0, r),
                f.derivative(MultiIndex::unit_anti(0, r)) * q(1, factorial(r)));
  return op;
}

// exp(s nu d dbar) in one variable
DiffOp flat_exp(int nu_order, long s) {
  DiffOp op(1, nu_order);
  long p = 1;
  for (int r = 0; r <= nu_order; ++r, p *= s)
    op.add_term(r, MultiIndex::unit_holo(0, r) + MultiIndex::unit_anti(0, r),
                JetSeries::constant(1, kExact, q(p, factorial(r))));
  return op;
}

bool same_series(const NuSeries& a, const NuSeries& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (!a[i].equals(b[i])) return false;
  return true;
}

NuSeries nu_series(const JetSeries& f) { return NuSeries{f}; }

NuSeries padded(const JetSeries& f, int nu_order) {
  NuSeries s(nu_order + 1, JetSeries(f.dim(), kExact));
  s[0] = f;
  return s;
}

}  // namespace

TEST_CASE("flat closed forms") {
  StarProduct sp(flat_potential(), 4);
  SampleGenerator gen(3);
  for (int i = 0; i < 3; ++i) {
    JetSeries f = gen.polynomial(1, 5, kExact, 5);
    CHECK(sp.mult_op(f, OpSide::left).equals(flat_left_closed_form(f, 4)));
  }
  // the closed form satisfies the commutation condition [L_f, zbar... ]:
  // with Phi = z zbar / nu, d Phi/dzbar + d/dzbar = z/nu + d/dzbar
  JetSeries f = gen.polynomial(1, 4, kExact, 4);
  DiffOp l = flat_left_closed_form(f, 4);
  DiffOp c = DiffOp::multiplication(JetSeries::z(1, 0), 4) + DiffOp::term(1, MultiIndex::unit_anti(0), one(), 4);
  DiffOp comm = op_compose(l, c) - op_compose(c, l);
  for (int r = 0; r < 4; ++r) CHECK(comm.grade(r).empty());

  NuSeries zz = star_multiply(sp, JetSeries::zbar(1, 0), JetSeries::z(1, 0));
  CHECK(zz[0].equals(JetSeries::z(1, 0) * JetSeries::zbar(1, 0)));
  CHECK(zz[1].equals(one()));
  for (int r = 2; r <= 4; ++r) CHECK(zz[r].is_zero());

  DiffOp b = berezin(sp);
  CHECK(b.equals(flat_exp(4, 1)));
  DiffOp x = operator_log(b);
  CHECK(x.nu_order() == 5);
  DiffOp x_expected(1, 5);
  x_expected.add_term(2, MultiIndex::unit_holo(0) + MultiIndex::unit_anti(0), one());
  CHECK(x.equals(x_expected));
  ParityResult py = parity_hat(x);
  for (int r = 0; r <= py.y.nu_order(); ++r) CHECK(py.y.grade(r).empty());

  DualBerezinReport dual = dual_berezin_check(sp);
  CHECK(dual.pass);
  CHECK(dual.b_dual.equals(flat_exp(4, -1)));

  DeformedGeometry d = h_from_x3(x);
  CHECK(d.h(0, 0).is_zero());
  SigmaYReport rep = sigma_y_pipeline(flat_potential(), 4, 5);
  CHECK(rep.pass);
  CHECK(rep.sigma_y.is_zero());
}

TEST_CASE("left multiplication: holomorphic functions and potential derivatives") {
  for (const char* name : {"disc", "fubini-study"}) {
    Preset p = preset_geometry(name, 12);
    StarProduct sp(p.potential, 4);
    JetSeries a = JetSeries::z(1, 0) * JetSeries::z(1, 0) + JetSeries::z(1, 0) * q(3);
    CHECK(sp.mult_op(a, OpSide::left).equals(DiffOp::multiplication(a, 4)));
    JetSeries b = JetSeries::zbar(1, 0) * JetSeries::zbar(1, 0) * q(-2);
    CHECK(sp.mult_op(b, OpSide::right).equals(DiffOp::multiplication(b, 4)));

    // nu dPhi/dz = dPhi_{-1}/dz for the default potential
    JetSeries dphi = p.potential.phi_minus1.d_holo(0);
    DiffOp expected = DiffOp::multiplication(dphi, 4) + DiffOp::term(1, MultiIndex::unit_holo(0), one(), 4);
    CHECK(sp.mult_op(dphi, OpSide::left).equals(expected));
    JetSeries dbar = p.potential.phi_minus1.d_anti(0);
    expected = DiffOp::multiplication(dbar, 4) + DiffOp::term(1, MultiIndex::unit_anti(0), one(), 4);
    CHECK(sp.mult_op(dbar, OpSide::right).equals(expected));
  }
  // with a nonzero Phi_0 the nu-series nu dPhi/dz = dPhi_{-1}/dz + nu dPhi_0/dz
  PotentialData p = curved_potential(10);
  p.higher = {jet(2, 10, {{{1, 0}, {0, 1}, q(1, 2)}, {{2, 0}, {1, 0}, 1}})};
  StarProduct sp(p, 3);
  for (int k = 0; k < 2; ++k) {
    NuSeries f{p.phi(-1).d_holo(k), p.phi(0).d_holo(k)};
    DiffOp expected = DiffOp::multiplication(p.phi(-1).d_holo(k), 3) +
                      DiffOp::multiplication(p.phi(0).d_holo(k), 3).shift_nu(1).truncated_nu(3) +
                      DiffOp::term(1, MultiIndex::unit_holo(k), one(2), 3);
    CHECK(sp.mult_op(f, OpSide::left).equals(expected));
  }
}

TEST_CASE("star product: unit, C_1, separation of variables, associativity") {
  std::vector<PotentialData> pots = {preset_geometry("disc", 12).potential,
                                     preset_geometry("fubini-study", 12).potential, curved_potential(9)};
  SampleGenerator gen(11);
  for (const auto& p : pots) {
    const int n = p.dim();
    const int r = n == 1 ? 3 : 2;
    StarProduct sp(p, r);
    const Geometry& g = sp.geometry();
    for (int i = 0; i < 2; ++i) {
      JetSeries u = gen.polynomial(n, 3, kExact, 4), v = gen.polynomial(n, 3, kExact, 4),
                w = gen.polynomial(n, 2, kExact, 3);
      NuSeries u1 = star_multiply(sp, u, one(n)), one_u = star_multiply(sp, one(n), u);
      CHECK(same_series(u1, padded(u, r)));
      CHECK(same_series(one_u, u1));

      JetSeries c1(n, kExact);
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) c1 += g.g(l, k) * u.d_anti(l) * v.d_holo(k);
      CHECK(star_component(sp, 1, u, v).equals(c1));
      CHECK((star_component(sp, 1, u, v) - star_component(sp, 1, v, u)).equals(chart_bracket(g.g_upper(), u, v)));

      JetSeries hol = gen.holomorphic(n, 3, kExact), anti = gen.antiholomorphic(n, 3, kExact);
      for (int s = 1; s <= r; ++s)
        CHECK(star_component(sp, s, u + hol, v + anti).equals(star_component(sp, s, u, v)));

      NuSeries lhs = star_multiply(sp, star_multiply(sp, u, v), nu_series(w));
      NuSeries rhs = star_multiply(sp, nu_series(u), star_multiply(sp, v, w));
      CHECK(same_series(lhs, rhs));
    }
  }
}

TEST_CASE("symbols of L_f and R_f are the source and target maps") {
  SampleGenerator gen(5);
  for (const char* name : {"disc", "fubini-study"}) {
    StarProduct sp(preset_geometry(name, 12).potential, 4);
    for (int i = 0; i < 2; ++i) {
      JetSeries f = gen.polynomial(1, 3, kExact, 4);
      FiberPoly s = sigma_symbol(sp.mult_op(f, OpSide::left));
      FiberPoly t = sigma_symbol(sp.mult_op(f, OpSide::right));
      CHECK(s.fiber_order() == 4);
      CHECK(s.equals(source_target_exp(sp.geometry(), f, Side::source, 4)));
      CHECK(t.equals(source_target_exp(sp.geometry(), f, Side::target, 4)));
    }
  }
  StarProduct sp2(curved_potential(9), 3);
  JetSeries f = gen.polynomial(2, 2, kExact, 4);
  CHECK(sigma_symbol(sp2.mult_op(f, OpSide::left)).equals(source_target_exp(sp2.geometry(), f, Side::source, 3)));
  CHECK(sigma_symbol(sp2.mult_op(f, OpSide::right)).equals(source_target_exp(sp2.geometry(), f, Side::target, 3)));
}

TEST_CASE("left and right multiplications commute") {
  SampleGenerator gen(8);
  std::vector<PotentialData> pots = {preset_geometry("disc", 12).potential, curved_potential(9)};
  for (const auto& p : pots) {
    const int n = p.dim();
    StarProduct sp(p, n == 1 ? 3 : 2);
    JetSeries f = gen.polynomial(n, 2, kExact, 3), g = gen.polynomial(n, 2, kExact, 3);
    DiffOp lf = sp.mult_op(f, OpSide::left), rg = sp.mult_op(g, OpSide::right);
    DiffOp c = op_compose(lf, rg) - op_compose(rg, lf);
    for (int r = 0; r <= c.nu_order(); ++r) CHECK(c.grade(r).empty());
  }
}

TEST_CASE("Berezin transform") {
  for (const char* name : {"disc", "fubini-study"}) {
    StarProduct sp(preset_geometry(name, 12).potential, 4);
    DiffOp b = berezin(sp);
    CHECK(b.grade(0).equals(DiffOp::identity(1, 0).grade(0)));
    DiffOp::Grade b1(1, kExact);
    b1.add(MultiIndex::unit_holo(0) + MultiIndex::unit_anti(0), sp.geometry().g(0, 0));
    CHECK(b.grade(1).equals(b1));

    SampleGenerator gen(2);
    JetSeries a = gen.holomorphic(1, 4, kExact), bb = gen.antiholomorphic(1, 4, kExact);
    CHECK(same_series(b.apply(a), padded(a, 4)));
    CHECK(same_series(b.apply(bb), padded(bb, 4)));
    // B(ab) = b * a
    CHECK(same_series(b.apply(a * bb), star_multiply(sp, bb, a)));

    // L_b = B b B^{-1}, R_a = B a B^{-1}
    DiffOp b_inv = op_inverse(b);
    CHECK(op_compose(b, b_inv).equals(DiffOp::identity(1, 4)));
    CHECK(sp.mult_op(bb, OpSide::left)
              .equals(op_compose(op_compose(b, DiffOp::multiplication(bb, 4)), b_inv)));
    CHECK(sp.mult_op(a, OpSide::right)
              .equals(op_compose(op_compose(b, DiffOp::multiplication(a, 4)), b_inv)));
  }
}

TEST_CASE("operator logarithm: naturality, X_2 and sigma(X) = K") {
  for (const char* name : {"disc", "fubini-study"}) {
    StarProduct sp(preset_geometry(name, 20).potential, 5);
    DiffOp x = operator_log(berezin(sp));
    CHECK(x.nu_order() == 6);
    CHECK(x.grade(0).empty());
    CHECK(x.grade(1).empty());
    DiffOp::Grade x2(1, kExact);
    x2.add(MultiIndex::unit_holo(0) + MultiIndex::unit_anti(0), sp.geometry().g(0, 0));
    CHECK(x.grade(2).equals(x2));
    CHECK(naturality_report(x, true).pass());

    FiberPoly k = sigma_symbol(x);
    KElement solved = solve_K(sp.geometry(), 6);
    CHECK(std::min(k.jet_order(), solved.value.jet_order()) >= 6);
    CHECK(k.equals(solved.value));
    for (const auto& [m, c] : k.terms()) {
      CHECK(m.holo_degree() >= 1);
      CHECK(m.anti_degree() >= 1);
      CHECK(m.degree() % 2 == 0);
    }

    ParityResult py = parity_hat(x);
    CHECK(py.x_hat.grade(2).equals(x.grade(2)));
    CHECK(py.x_hat.grade(3).equals((x * Scalar(-1)).grade(3)));
    CHECK(py.y.nu_order() == 5);
    CHECK(py.y.grade(2).equals(x.grade(3)));
    CHECK(py.y.grade(3).empty());
    CHECK(naturality_report(py.y).pass());
  }
  StarProduct sp2(curved_potential(10), 3);
  DiffOp x = operator_log(berezin(sp2));
  KElement solved = solve_K(sp2.geometry(), 4);
  CHECK(solved.value.jet_order() >= 2);
  CHECK(sigma_symbol(x).equals(solved.value));
}

namespace {

PotentialData with_phi0(PotentialData p, const JetSeries& psi) {
  p.higher = {psi};
  return p;
}

std::vector<JetSeries> monomials(int dim, int max_degree) {
  std::vector<JetSeries> out;
  for (const auto& m : enumerate_total(dim, max_degree, max_degree, max_degree))
    out.push_back(JetSeries::monomial(dim, kExact, m));
  return out;
}

}  // namespace

TEST_CASE("pair deformation: flat examples") {
  PotentialData flat = flat_potential();
  JetSeries psi = JetSeries::z(1, 0) * JetSeries::zbar(1, 0);
  StarProduct sp(with_phi0(flat, psi), 4), sp_tilde(flat, 4);
  CHECK(pair_s1(sp_tilde, sp_tilde, JetSeries::zbar(1, 0), Side::source).is_zero());
  FiberPoly s1 = pair_s1(sp, sp_tilde, JetSeries::zbar(1, 0), Side::source);
  CHECK(s1.equals(-FiberPoly::zeta(1, 0)));
  CHECK(s1.equals(s1_via_potential(sp.geometry(), psi, JetSeries::zbar(1, 0), Side::source, 3)));

  PotentialData other = flat;
  other.phi_minus1 = flat.phi_minus1 * q(2);
  StarProduct sp_other(other, 4);
  CHECK_THROWS_WITH_AS(pair_s1(sp, sp_other, one(), Side::source), doctest::Contains("Phi_{-1}"), Error);
}

TEST_CASE("pair deformation agrees with the potential formula") {
  SampleGenerator gen(21);
  std::vector<std::pair<PotentialData, JetSeries>> cases = {
      {flat_potential(), gen.polynomial(1, 4, kExact, 4)},
      {preset_geometry("disc", 12).potential, disc_potential(14)},
      {preset_geometry("disc", 12).potential, gen.polynomial(1, 4, kExact, 4)},
      {curved_potential(8), gen.polynomial(2, 3, kExact, 4)}};
  for (const auto& [base, psi] : cases) {
    const int n = base.dim();
    const int r = n == 1 ? 4 : 3;
    StarProduct sp(with_phi0(base, psi), r), sp_tilde(base, r);
    const Geometry& g = sp.geometry();
    for (const auto& f : monomials(n, n == 1 ? 3 : 2)) {
      for (Side side : {Side::source, Side::target}) {
        FiberPoly s1 = pair_s1(sp, sp_tilde, f, side);
        CHECK(s1.fiber_order() == r - 1);
        CHECK(s1.equals(s1_via_potential(g, psi, f, side, r - 1)));
      }
    }
    // S_1(dPhi_{-1}/dz^k) = dpsi/dz^k - S_0 dpsi/dz^k
    for (int k = 0; k < n; ++k) {
      JetSeries dpsi = psi.d_holo(k);
      FiberPoly expected = FiberPoly::lift(dpsi) - source_target_exp(g, dpsi, Side::source, r - 1);
      CHECK(pair_s1(sp, sp_tilde, base.phi_minus1.d_holo(k), Side::source).equals(expected));
    }
    // C_1 coincide; D_2 - D_2~ is a derivation in each argument
    JetSeries u = gen.polynomial(n, 2, kExact, 3), v = gen.polynomial(n, 2, kExact, 3),
              w = gen.polynomial(n, 2, kExact, 3);
    CHECK(star_component(sp, 1, u, v).equals(star_component(sp_tilde, 1, u, v)));
    auto bracket1 = [&](const JetSeries& a, const JetSeries& b) {
      return star_component(sp, 2, a, b) - star_component(sp, 2, b, a) - star_component(sp_tilde, 2, a, b) +
             star_component(sp_tilde, 2, b, a);
    };
    CHECK(bracket1(u * v, w).equals(u * bracket1(v, w) + v * bracket1(u, w)));
    CHECK(bracket1(w, u * v).equals(u * bracket1(w, v) + v * bracket1(w, u)));
  }
}

TEST_CASE("pair deformation satisfies the deformed groupoid axioms") {
  PotentialData base = preset_geometry("disc", 12).potential;
  JetSeries psi = jet(1, kExact, {{{1}, {1}, q(1, 2)}, {{2}, {1}, 1}, {{0}, {2}, q(-1, 3)}});
  StarProduct sp(with_phi0(base, psi), 4), sp_tilde(base, 4);
  SourceTargetMap s = pair_map(sp, sp_tilde, Side::source), t = pair_map(sp, sp_tilde, Side::target);
  DeformedGeometry d = h_from_psi(sp.geometry(), psi);
  SampleGenerator gen(4);
  std::vector<std::pair<JetSeries, JetSeries>> samples;
  for (int i = 0; i < 3; ++i) samples.emplace_back(gen.polynomial(1, 2, kExact, 3), gen.polynomial(1, 2, kExact, 3));
  AxiomReport rep = verify_axioms(s, t, d, samples);
  CHECK(rep.pass);
  CHECK(rep.rows.size() == 21);
  // read back (g, h) from the map
  auto rec = recover_tensors(s);
  REQUIRE(std::holds_alternative<DeformedGeometry>(rec));
  CHECK(std::get<DeformedGeometry>(rec).h(0, 0).equals(d.h(0, 0)));
}

TEST_CASE("dual Berezin transform") {
  StarProduct disc(preset_geometry("disc", 16).potential, 4);
  DualBerezinReport rep = dual_berezin_check(disc, 10, 7);
  CHECK(rep.pass);
  CHECK(rep.failures.empty());
  CHECK(rep.b_dual.nu_order() == 4);
  CHECK(rep.b_dual.grade(1).equals((berezin(disc) * Scalar(-1)).grade(1)));

  StarProduct curved(curved_potential(10), 2);
  CHECK(dual_berezin_check(curved, 2, 3).pass);
}

TEST_CASE("h from X_3 and the sigma(Y) = J/2 pipeline") {
  for (const char* name : {"disc", "fubini-study"}) {
    PotentialData p = preset_geometry(name, 12).potential;
    SigmaYReport rep = sigma_y_pipeline(p, 4, 5);
    CHECK(rep.pass);
    CHECK(rep.fiber_order == 4);
    CHECK(std::min(rep.sigma_y.jet_order(), rep.half_j.jet_order()) >= 4);
    REQUIRE(rep.degree_ok.size() == 5);
    CHECK(rep.degree_ok[2].second);
    CHECK(rep.degree_ok[4].second);
    CHECK_FALSE(rep.sigma_y.homogeneous(4).is_zero());
    CHECK(rep.sigma_y.homogeneous(3).is_zero());
    CHECK(jacobi_deformed_check(rep.deformation).pass);
    CHECK(rep.sigma_y.homogeneous(2).equals(rep.half_j.homogeneous(2)));
  }
  SigmaYReport rep2 = sigma_y_pipeline(curved_potential(12), 2, 3);
  CHECK(rep2.pass);
  CHECK(jacobi_deformed_check(rep2.deformation).pass);

  CHECK_THROWS_WITH_AS(sigma_y_pipeline(flat_potential(), 4, 4), doctest::Contains("R >= N + 1"), Error);
  DiffOp bad(1, 3);
  bad.add_term(3, MultiIndex::unit_holo(0, 2), one());
  bad.add_term(2, MultiIndex::unit_holo(0) + MultiIndex::unit_anti(0), one());
  CHECK_THROWS_AS(h_from_x3(bad), Error);
}

TEST_CASE("degenerate potential and operator cache") {
  PotentialData p;
  p.phi_minus1 = JetSeries::z(1, 0) * JetSeries::z(1, 0);
  CHECK_THROWS_AS(StarProduct(p, 2), Error);

  StarProduct sp(preset_geometry("disc", 10).potential, 3);
  JetSeries f = JetSeries::zbar(1, 0) * q(3);
  DiffOp a = sp.mult_op(f, OpSide::left);
  StarProduct copy = sp;
  CHECK(copy.mult_op(f, OpSide::left).equals(a));
  CHECK_FALSE(sp.mult_op(f, OpSide::right).equals(a));
}
