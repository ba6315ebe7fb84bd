#include "sepvar/kset.hpp"

#include <map>

namespace sepvar {

namespace {

template <class C>
Fiber<C> quadratic_form(const JetMatrix<C>& g) {
  const int n = static_cast<int>(g.size());
  const int dim = g[0][0].dim();
  Fiber<C> k(dim, kExact, kExact);
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j) k += g[l][j] * (Fiber<C>::zeta(dim, j) * Fiber<C>::zetabar(dim, l));
  return k;
}

[[noreturn]] void inconsistent(int n, const std::string& what) {
  throw Error(ErrorCode::InconsistentRecursion, "degree " + std::to_string(n) + ": " + what);
}

/// Second fiber derivatives of K_n read off the recursion right-hand side:
/// R[k][j] = -d/dzeta_j (e^{H_{K<n}} z^k)_{n-1}, or the zetabar version.
template <class C>
std::vector<std::vector<Fiber<C>>> hessian_rhs(const Fiber<C>& k_low, int n, int dim, int jdim, bool holo) {
  std::vector<std::vector<Fiber<C>>> r(dim);
  for (int a = 0; a < dim; ++a) {
    Jet<C> coord = holo ? Jet<C>::z(jdim, a) : Jet<C>::zbar(jdim, a);
    Fiber<C> top = ham_exp(k_low, Fiber<C>::lift(coord), n - 1).homogeneous(n - 1);
    for (int b = 0; b < dim; ++b) r[a].push_back(-(holo ? top.d_zeta(b) : top.d_zetabar(b)));
  }
  return r;
}

/// Euler reconstruction of the bidegree (p, q) component from R.
template <class C>
Fiber<C> euler_component(const std::vector<std::vector<Fiber<C>>>& r, int p, int q, int jdim, bool holo) {
  const int dim = static_cast<int>(r.size());
  const int m = holo ? p : q;
  Fiber<C> out(jdim, kExact, kExact);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      Fiber<C> part = holo ? r[a][b].component(p - 2, q) : r[a][b].component(p, q - 2);
      Fiber<C> vv = holo ? Fiber<C>::zeta(jdim, a) * Fiber<C>::zeta(jdim, b)
                         : Fiber<C>::zetabar(jdim, a) * Fiber<C>::zetabar(jdim, b);
      out += vv * part;
    }
  out *= C(Scalar::rational(1, m * (m - 1)));
  return out;
}

}  // namespace

template <class C>
Fiber<C> solve_element(const JetMatrix<C>& g, int n) {
  if (n < 2) throw Error(ErrorCode::UsageError, "fiber order must be at least 2");
  const int dim = static_cast<int>(g.size());
  const int jdim = g[0][0].dim();
  if (matrix_jet_order(g) < n)
    throw Error(ErrorCode::TruncationInsufficient, "tensor known through jet order " +
                                                       std::to_string(matrix_jet_order(g)) +
                                                       " cannot support fiber order " + std::to_string(n));
  Fiber<C> k = quadratic_form(g);
  for (int d = 3; d <= n; ++d) {
    auto r = hessian_rhs(k, d, dim, jdim, true);
    auto rb = hessian_rhs(k, d, dim, jdim, false);
    for (int a = 0; a < dim; ++a)
      for (int b = a + 1; b < dim; ++b) {
        if (!r[a][b].equals(r[b][a])) inconsistent(d, "holomorphic right-hand side is not symmetric");
        if (!rb[a][b].equals(rb[b][a])) inconsistent(d, "antiholomorphic right-hand side is not symmetric");
      }
    Fiber<C> kd(jdim, kExact, kExact);
    for (int p = 0; p <= d; ++p) {
      int q = d - p;
      std::optional<Fiber<C>> from_holo, from_anti;
      if (p >= 2) from_holo = euler_component(r, p, q, jdim, true);
      if (q >= 2) from_anti = euler_component(rb, p, q, jdim, false);
      if (from_holo && from_anti && !from_holo->equals(*from_anti))
        inconsistent(d, "bidegree (" + std::to_string(p) + "," + std::to_string(q) + ") differs between routes");
      kd += from_holo ? *from_holo : *from_anti;
    }
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) {
        if (!kd.d_zeta(a).d_zeta(b).equals(r[a][b])) inconsistent(d, "holomorphic residual does not vanish");
        if (!kd.d_zetabar(a).d_zetabar(b).equals(rb[a][b])) inconsistent(d, "antiholomorphic residual does not vanish");
      }
    if (d % 2 == 1 && !kd.is_zero()) inconsistent(d, "odd component is nonzero");
    k += kd;
  }
  k.lower_fiber_order(n);
  return k;
}

template FiberPoly solve_element(const JetMatrix<Scalar>&, int);
template DualFiber solve_element(const JetMatrix<Dual>&, int);

KElement solve_K(const Geometry& g, int n) { return KElement{g, n, solve_element(g.g_upper(), n)}; }

FElement solve_F(const DeformedGeometry& d, int n) { return FElement{d, n, solve_element(d.combined(), n)}; }

std::vector<MembershipRow> MembershipReport::failures() const {
  std::vector<MembershipRow> out;
  for (const auto& r : rows)
    if (!r.pass) out.push_back(r);
  return out;
}

template <class C>
MembershipReport membership_report(const Fiber<C>& f, int test_degree, std::optional<int> fiber_order) {
  if (!f.is_zero() && f.min_degree() < 2)
    throw Error(ErrorCode::FiberDegreeTooLow, "membership_report: element has terms of fiber degree < 2");
  const int jdim = f.dim();
  int cap = fiber_order.value_or(f.fiber_order() < kExact ? f.fiber_order() : 2 * test_degree + 2);
  cap = std::min(cap, f.fiber_order());
  Fiber<C> ff = f.truncated_fiber(cap);
  MembershipReport rep;
  rep.test_degree = test_degree;
  rep.fiber_order = kExact;
  for (bool holo : {true, false}) {
    std::vector<MultiIndex> monos;
    for (const auto& m : enumerate_total(jdim, test_degree, test_degree, test_degree))
      if (m.degree() >= 1 && (holo ? m.anti_degree() == 0 : m.holo_degree() == 0)) monos.push_back(m);
    for (const auto& a : monos) {
      Fiber<C> ea = ham_exp(ff, Fiber<C>::lift(Jet<C>::monomial(jdim, kExact, a)), cap);
      for (const auto& b : monos) {
        Fiber<C> res = poisson_bracket(ea, Fiber<C>::lift(Jet<C>::monomial(jdim, kExact, b)));
        rep.fiber_order = std::min(rep.fiber_order, res.fiber_order());
        MembershipRow row{holo ? "holomorphic" : "antiholomorphic", a, b, res.is_zero(),
                          res.is_zero() ? "0" : res.to_string()};
        rep.pass = rep.pass && row.pass;
        rep.rows.push_back(std::move(row));
      }
    }
  }
  return rep;
}

template MembershipReport membership_report(const FiberPoly&, int, std::optional<int>);
template MembershipReport membership_report(const DualFiber&, int, std::optional<int>);

template <class C>
Fiber<C> st_from_element(const Fiber<C>& f, const Jet<C>& a, const Jet<C>& b, Side side) {
  if (!a.is_holomorphic())
    throw Error(ErrorCode::PurityViolation, "st_from_element: first factor must be holomorphic");
  if (!b.is_antiholomorphic())
    throw Error(ErrorCode::PurityViolation, "st_from_element: second factor must be antiholomorphic");
  if (side == Side::source) return a * ham_exp(f, Fiber<C>::lift(b), f.fiber_order());
  return b * ham_exp(f, Fiber<C>::lift(a), f.fiber_order());
}

template FiberPoly st_from_element(const FiberPoly&, const JetSeries&, const JetSeries&, Side);
template DualFiber st_from_element(const DualFiber&, const DualJet&, const DualJet&, Side);

template <class C>
Fiber<C> st_apply(const Fiber<C>& f, const Jet<C>& u, Side side) {
  const int jdim = f.dim();
  std::map<MultiIndex, Fiber<C>> cache;
  auto exp_of = [&](const MultiIndex& m) -> const Fiber<C>& {
    auto it = cache.find(m);
    if (it == cache.end())
      it = cache.emplace(m, ham_exp(f, Fiber<C>::lift(Jet<C>::monomial(jdim, kExact, m)), f.fiber_order())).first;
    return it->second;
  };
  Fiber<C> out(jdim, kExact, kExact);
  for (const auto& [m, c] : u.terms()) {
    MultiIndex hol = MultiIndex::from(m.holo_vector(kMaxDim), {});
    MultiIndex anti = MultiIndex::from({}, m.anti_vector(kMaxDim));
    MultiIndex moving = side == Side::source ? anti : hol;
    MultiIndex fixed = side == Side::source ? hol : anti;
    out += Jet<C>::monomial(jdim, kExact, fixed, c) * exp_of(moving);
  }
  // Terms of u beyond its order are unknown.
  if (!u.is_exact()) out.lower_jet_order(u.order());
  return out;
}

template FiberPoly st_apply(const FiberPoly&, const JetSeries&, Side);
template DualFiber st_apply(const DualFiber&, const DualJet&, Side);

SourceTargetMap make_map(const KElement& k, Side side) {
  SourceTargetMap m;
  m.dim = k.geometry.dim();
  m.side = side;
  m.fiber_order = k.fiber_order - 1;
  m.eval = [value = k.value, side](const JetSeries& f) { return lift(st_apply(value, f, side)); };
  return m;
}

SourceTargetMap make_map(const FElement& f, Side side) {
  SourceTargetMap m;
  m.dim = f.geometry.dim();
  m.side = side;
  m.fiber_order = f.fiber_order - 1;
  m.deformed = true;
  m.eval = [value = f.value, side](const JetSeries& u) { return st_apply(value, lift(u), side); };
  return m;
}

FiberPoly deformation_from_hamiltonian(const KElement& k, const FiberPoly& j, const JetSeries& f, Side side) {
  if (!j.is_zero() && j.min_degree() < 2)
    throw Error(ErrorCode::FiberDegreeTooLow, "deformation_from_hamiltonian: J has terms of fiber degree < 2");
  const int cap = std::min(k.fiber_order, j.fiber_order());
  FiberPoly term = j.truncated_fiber(cap);
  FiberPoly g = term;
  for (int m = 1; !term.is_zero() && term.min_degree() + 1 <= cap; ++m) {
    term = poisson_bracket(k.value, term);
    term.lower_fiber_order(std::min(cap, term.fiber_order()));
    term *= Scalar::rational(1, m + 1);
    g += term;
  }
  const int jdim = k.value.dim();
  FiberPoly out(jdim, kExact, kExact);
  for (const auto& [m, c] : f.terms()) {
    MultiIndex hol = MultiIndex::from(m.holo_vector(kMaxDim), {});
    MultiIndex anti = MultiIndex::from({}, m.anti_vector(kMaxDim));
    MultiIndex moving = side == Side::source ? anti : hol;
    MultiIndex fixed = side == Side::source ? hol : anti;
    FiberPoly base = ham_exp(k.value, FiberPoly::lift(JetSeries::monomial(jdim, kExact, moving)), k.fiber_order);
    out += JetSeries::monomial(jdim, kExact, fixed, c) * poisson_bracket(g, base);
  }
  if (!f.is_exact()) out.lower_jet_order(f.order());
  return out;
}

}  // namespace sepvar
