#include "sepvar/groupoid.hpp"

namespace sepvar {

std::string to_string(Side s) { return s == Side::source ? "source" : "target"; }

Side parse_side(const std::string& s) {
  if (s == "source") return Side::source;
  if (s == "target") return Side::target;
  throw Error(ErrorCode::UsageError, "side must be 'source' or 'target', got '" + s + "'");
}

template <class C>
VectorField<C> groupoid_field(const JetMatrix<C>& g, Side side) {
  const int n = static_cast<int>(g.size());
  const int dim = n == 0 ? 0 : g[0][0].dim();
  VectorField<C> x(dim);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      if (g[l][k].is_zero() && g[l][k].is_exact()) continue;
      if (side == Side::source)
        x.add(kMaxDim + l, g[l][k] * Fiber<C>::zeta(dim, k));
      else
        x.add(k, g[l][k] * Fiber<C>::zetabar(dim, l));
    }
  return x;
}

template VectorField<Scalar> groupoid_field(const JetMatrix<Scalar>&, Side);
template VectorField<Dual> groupoid_field(const JetMatrix<Dual>&, Side);

namespace {

template <class C>
void require_budget(const JetMatrix<C>& g, int n) {
  int m = matrix_jet_order(g);
  if (m < n)
    throw Error(ErrorCode::TruncationInsufficient, "tensor known through jet order " + std::to_string(m) +
                                                       " cannot support " + std::to_string(n) +
                                                       " derivative applications");
}

}  // namespace

FiberPoly source_target_exp(const Geometry& g, const JetSeries& f, Side side, int n) {
  require_budget(g.g_upper(), n);
  return vf_exp(groupoid_field(g.g_upper(), side), FiberPoly::lift(f), n);
}

DualFiber deformed_source_target(const DeformedGeometry& d, const JetSeries& f, Side side, int n) {
  require_budget(d.combined(), n);
  return vf_exp(groupoid_field(d.combined(), side), DualFiber::lift(lift(f)), n);
}

FiberPoly s1_via_ad_series(const DeformedGeometry& d, const JetSeries& f, Side side, int n) {
  VectorField<Scalar> dd = groupoid_field(d.base().g_upper(), side);
  VectorField<Scalar> term = groupoid_field(d.h_upper(), side);
  term.truncate_fiber(n);
  VectorField<Scalar> v = term;
  for (int m = 1; m + 1 <= n && !term.is_zero(); ++m) {
    term = bracket(dd, term);
    term.truncate_fiber(n);
    term *= Scalar::rational(1, m + 1);
    v += term;
  }
  FiberPoly out = v.apply(source_target_exp(d.base(), f, side, n));
  out.lower_fiber_order(std::min(n, out.fiber_order()));
  return out;
}

FiberPoly s1_via_potential(const Geometry& g, const JetSeries& psi, const JetSeries& f, Side side, int n) {
  const int dim = g.dim();
  FiberPoly s0f = source_target_exp(g, f, side, n);
  FiberPoly out(psi.dim(), kExact, kExact);
  for (int p = 0; p < dim; ++p) {
    JetSeries psi_p = side == Side::source ? psi.d_holo(p) : psi.d_anti(p);
    FiberPoly prefactor = FiberPoly::lift(psi_p) - source_target_exp(g, psi_p, side, n);
    FiberPoly dp(psi.dim(), kExact, kExact);
    for (int j = 0; j < dim; ++j) {
      if (side == Side::source)
        dp += g.g(j, p) * s0f.d_base(kMaxDim + j);
      else
        dp += g.g(p, j) * s0f.d_base(j);
    }
    out += prefactor * dp;
  }
  out.lower_fiber_order(std::min(n, out.fiber_order()));
  return out;
}

DualFiber SourceTargetMap::apply(const DualJet& f) const {
  DualFiber r = eval(body(f));
  JetSeries v = soul(f);
  if (!v.is_zero()) r += make_dual(FiberPoly(dim, kExact, kExact), body(eval(v)));
  return r;
}

SourceTargetMap make_map(const Geometry& g, Side side, int n) {
  SourceTargetMap m;
  m.dim = g.dim();
  m.side = side;
  m.fiber_order = n;
  m.eval = [g, side, n](const JetSeries& f) { return lift(source_target_exp(g, f, side, n)); };
  return m;
}

SourceTargetMap make_map(const DeformedGeometry& d, Side side, int n) {
  SourceTargetMap m;
  m.dim = d.dim();
  m.side = side;
  m.fiber_order = n;
  m.deformed = true;
  m.eval = [d, side, n](const JetSeries& f) { return deformed_source_target(d, f, side, n); };
  return m;
}

std::variant<Geometry, DeformedGeometry> recover_tensors(const SourceTargetMap& map) {
  const int n = map.dim;
  JetMatrix<Scalar> g(n, std::vector<JetSeries>(n)), h(n, std::vector<JetSeries>(n));
  if (map.side == Side::source) {
    for (int l = 0; l < n; ++l) {
      DualFiber s = map(JetSeries::zbar(n, l));
      for (int k = 0; k < n; ++k) {
        DualJet e = s.d_zeta(k).zero_section();
        g[l][k] = body(e);
        h[l][k] = soul(e);
      }
    }
  } else {
    for (int k = 0; k < n; ++k) {
      DualFiber t = map(JetSeries::z(n, k));
      for (int l = 0; l < n; ++l) {
        DualJet e = t.d_zetabar(l).zero_section();
        g[l][k] = body(e);
        h[l][k] = soul(e);
      }
    }
  }
  Geometry base(std::move(g));
  if (!map.deformed) return base;
  return DeformedGeometry(std::move(base), std::move(h));
}

template <class C>
Jet<C> chart_bracket(const JetMatrix<C>& g, const Jet<C>& f, const Jet<C>& h) {
  const int n = static_cast<int>(g.size());
  Jet<C> out(f.dim(), kExact);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) out += g[l][k] * (f.d_anti(l) * h.d_holo(k) - h.d_anti(l) * f.d_holo(k));
  return out;
}

template JetSeries chart_bracket(const JetMatrix<Scalar>&, const JetSeries&, const JetSeries&);
template DualJet chart_bracket(const JetMatrix<Dual>&, const DualJet&, const DualJet&);

std::vector<AxiomRow> AxiomReport::failures() const {
  std::vector<AxiomRow> out;
  for (const auto& r : rows)
    if (!r.pass) out.push_back(r);
  return out;
}

AxiomReport verify_axioms(const SourceTargetMap& s, const SourceTargetMap& t, const DeformedGeometry& d,
                          const std::vector<std::pair<JetSeries, JetSeries>>& samples) {
  AxiomReport rep;
  auto record = [&](const std::string& name, int i, const auto& residual) {
    AxiomRow row{name, i, residual.is_zero(), residual.is_zero() ? "0" : residual.to_string()};
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(std::move(row));
  };
  const JetMatrix<Dual> gh = d.combined();
  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    const auto& [f, g] = samples[i];
    DualFiber sf = s(f), sg = s(g), tf = t(f), tg = t(g);
    record("source zero section", i, sf.zero_section() - lift(f));
    record("target zero section", i, tf.zero_section() - lift(f));
    record("source product", i, s(f * g) - sf * sg);
    record("target product", i, t(f * g) - tf * tg);
    DualJet br = chart_bracket(gh, lift(f), lift(g));
    record("source Poisson", i, s.apply(br) - poisson_bracket(sf, sg));
    record("target anti-Poisson", i, t.apply(br) + poisson_bracket(tf, tg));
    record("source-target commutation", i, poisson_bracket(sf, tg));
  }
  return rep;
}

}  // namespace sepvar
