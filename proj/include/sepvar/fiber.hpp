#pragma once

#include <string>
#include <utility>

#include "sepvar/jet_table.hpp"

namespace sepvar {

/// Polynomial in the fiber variables (zeta, zetabar) of T*M with jet
/// coefficients; a truncated function on the formal neighbourhood of the
/// zero section.
///
/// Fiber keys use the holomorphic slots for zeta_k and the antiholomorphic
/// slots for zetabar_l. Terms of fiber degree > fiber_order() are unknown
/// (kExact: none are missing). The truncation rules are conservative and
/// exact: a product of P and Q is known through
/// min(N_P + mindeg Q, N_Q + mindeg P).
template <class C>
class Fiber {
 public:
  using Coeff = C;

  Fiber() = default;
  Fiber(int dim, int jet_order, int fiber_order) : table_(dim, jet_order), fiber_order_(fiber_order) {
    if (fiber_order < 0) throw Error(ErrorCode::TruncationInsufficient, "fiber order dropped below zero");
  }

  /// Pullback of a base function: fiber-constant and exact in the fiber.
  static Fiber lift(const Jet<C>& f) {
    Fiber p(f.dim(), f.order(), kExact);
    p.add(MultiIndex(), f);
    return p;
  }
  static Fiber monomial(const MultiIndex& fiber_key, const Jet<C>& coeff, int fiber_order = kExact) {
    Fiber p(coeff.dim(), coeff.order(), fiber_order);
    p.add(fiber_key, coeff);
    return p;
  }
  static Fiber zeta(int dim, int k) { return monomial(MultiIndex::unit_holo(k), Jet<C>::constant(dim, kExact, C(1))); }
  static Fiber zetabar(int dim, int l) { return monomial(MultiIndex::unit_anti(l), Jet<C>::constant(dim, kExact, C(1))); }

  int dim() const { return table_.dim(); }
  int jet_order() const { return table_.jet_order(); }
  int fiber_order() const { return fiber_order_; }
  const auto& terms() const { return table_.terms(); }
  bool is_zero() const { return table_.empty(); }
  bool is_exact_zero() const { return table_.is_exact_zero() && fiber_order_ >= kExact; }
  Jet<C> coeff(const MultiIndex& key) const { return table_.at(key); }

  void add(const MultiIndex& key, const Jet<C>& c) {
    if (key.degree() > fiber_order_) return;
    if (key.used_dim() > dim()) throw Error(ErrorCode::DimensionMismatch, "fiber monomial beyond chart dimension");
    table_.add(key, c);
  }

  void lower_fiber_order(int order) {
    if (order >= fiber_order_) return;
    if (order < 0) throw Error(ErrorCode::TruncationInsufficient, "fiber order dropped below zero");
    fiber_order_ = order;
    std::erase_if(table_.mutable_terms(), [&](const auto& kv) { return kv.first.degree() > order; });
  }
  void lower_jet_order(int order) { table_.lower_jet_order(order); }

  /// Smallest fiber degree present (kExact for the zero polynomial).
  int min_degree() const {
    int d = kExact;
    for (const auto& [k, c] : terms()) d = std::min(d, k.degree());
    return d;
  }
  int max_degree() const {
    int d = -1;
    for (const auto& [k, c] : terms()) d = std::max(d, k.degree());
    return d;
  }

  Fiber& operator+=(const Fiber& o) {
    same_dim(o);
    lower_fiber_order(o.fiber_order_);
    table_.lower_jet_order(o.jet_order());
    for (const auto& [k, c] : o.terms()) add(k, c);
    return *this;
  }
  Fiber& operator-=(const Fiber& o) {
    same_dim(o);
    lower_fiber_order(o.fiber_order_);
    table_.lower_jet_order(o.jet_order());
    for (const auto& [k, c] : o.terms()) add(k, -c);
    return *this;
  }
  Fiber& operator*=(const C& s) {
    table_.scale(s);
    return *this;
  }

  friend Fiber operator+(Fiber a, const Fiber& b) { return a += b; }
  friend Fiber operator-(Fiber a, const Fiber& b) { return a -= b; }
  friend Fiber operator-(Fiber a) {
    a *= C(-1);
    return a;
  }
  friend Fiber operator*(Fiber a, const C& s) { return a *= s; }
  friend Fiber operator*(const C& s, Fiber a) { return a *= s; }

  friend Fiber operator*(const Fiber& a, const Fiber& b) {
    a.same_dim(b);
    if (a.is_exact_zero() || b.is_exact_zero()) return Fiber(a.dim(), kExact, kExact);
    int order = std::min(raise_order(a.fiber_order_, b.min_degree()), raise_order(b.fiber_order_, a.min_degree()));
    Fiber r(a.dim(), std::min(a.jet_order(), b.jet_order()), order);
    for (const auto& [ka, ca] : a.terms()) {
      int da = ka.degree();
      if (da > order) continue;
      for (const auto& [kb, cb] : b.terms()) {
        if (da + kb.degree() > order) continue;
        r.add(ka + kb, ca * cb);
      }
    }
    return r;
  }
  Fiber& operator*=(const Fiber& o) { return *this = *this * o; }

  friend Fiber operator*(const Jet<C>& f, const Fiber& p) { return lift(f) * p; }

  /// d/d zeta_k (holomorphic fiber slot) or d/d zetabar_l.
  Fiber d_fiber(int v) const {
    Fiber r(dim(), jet_order(), lower_order(fiber_order_));
    for (const auto& [k, c] : terms()) {
      int e = k.var(v);
      if (e == 0) continue;
      MultiIndex d = k;
      d.set_var(v, e - 1);
      r.add(d, c * C(e));
    }
    return r;
  }
  Fiber d_zeta(int k) const { return d_fiber(k); }
  Fiber d_zetabar(int l) const { return d_fiber(kMaxDim + l); }

  /// Coefficientwise derivative in the base variable v.
  Fiber d_base(int v) const {
    Fiber r(dim(), lower_order(jet_order()), fiber_order_);
    for (const auto& [k, c] : terms()) r.add(k, c.derivative(v));
    return r;
  }

  /// Component of bidegree (p, q): degree p in zeta and q in zetabar.
  Fiber component(int p, int q) const {
    require_known(p + q);
    Fiber r(dim(), jet_order(), fiber_order_);
    for (const auto& [k, c] : terms())
      if (k.holo_degree() == p && k.anti_degree() == q) r.add(k, c);
    r.fiber_order_ = kExact;
    return r;
  }
  /// Homogeneous component of total fiber degree d.
  Fiber homogeneous(int d) const {
    require_known(d);
    Fiber r(dim(), jet_order(), kExact);
    for (const auto& [k, c] : terms())
      if (k.degree() == d) r.add(k, c);
    return r;
  }
  Fiber truncated_fiber(int order) const {
    Fiber r = *this;
    r.lower_fiber_order(order);
    return r;
  }

  /// The restriction E to the zero section.
  Jet<C> zero_section() const {
    Jet<C> r = coeff(MultiIndex());
    r.lower_to(jet_order());
    return r;
  }

  /// Equality up to the common fiber and jet orders.
  bool equals(const Fiber& o) const {
    if (dim() != o.dim()) return false;
    int fo = std::min(fiber_order_, o.fiber_order_);
    int jo = std::min(jet_order(), o.jet_order());
    Fiber a = *this, b = o;
    a.lower_fiber_order(fo);
    b.lower_fiber_order(fo);
    a.lower_jet_order(jo);
    b.lower_jet_order(jo);
    return a.table_.equals(b.table_);
  }

  template <class F>
  auto map_coeffs(F f) const {
    using D = decltype(f(std::declval<const C&>()));
    Fiber<D> r(dim(), jet_order(), fiber_order_);
    for (const auto& [k, c] : terms()) r.add(k, c.map_coeffs(f));
    r.lower_jet_order(jet_order());
    return r;
  }

  /// Exchanges zeta <-> zetabar together with z <-> zbar in coefficients.
  Fiber swapped() const {
    Fiber r(dim(), jet_order(), fiber_order_);
    for (const auto& [k, c] : terms()) r.add(k.swapped(), c.swapped());
    return r;
  }

  std::string to_string() const;

 private:
  template <class>
  friend class Fiber;

  void same_dim(const Fiber& o) const {
    if (dim() != o.dim()) throw Error(ErrorCode::DimensionMismatch, "fiber polynomials of different chart dimension");
  }
  void require_known(int degree) const {
    if (degree > fiber_order_)
      throw Error(ErrorCode::TruncationInsufficient,
                  "fiber degree " + std::to_string(degree) + " exceeds fiber order " + std::to_string(fiber_order_));
  }

  JetTable<C> table_;
  int fiber_order_ = kExact;
};

using FiberPoly = Fiber<Scalar>;
using DualFiber = Fiber<Dual>;

/// Canonical Poisson bracket on T*M:
/// {P,Q} = sum_k (P_zeta_k Q_z^k - P_z^k Q_zeta_k) + sum_l (P_zetabar_l Q_zbar^l - P_zbar^l Q_zetabar_l).
template <class C>
Fiber<C> poisson_bracket(const Fiber<C>& p, const Fiber<C>& q) {
  if (p.dim() != q.dim()) throw Error(ErrorCode::DimensionMismatch, "poisson_bracket: dimension mismatch");
  Fiber<C> r(p.dim(), kExact, kExact);
  for (int i = 0; i < p.dim(); ++i) {
    for (int v : {i, kMaxDim + i}) {
      r += p.d_fiber(v) * q.d_base(v);
      r -= p.d_base(v) * q.d_fiber(v);
    }
  }
  return r;
}

inline DualFiber lift(const FiberPoly& p) {
  return p.map_coeffs([](const Scalar& s) { return Dual(s); });
}
inline DualFiber make_dual(const FiberPoly& b, const FiberPoly& s) {
  DualFiber r = lift(b);
  r += s.map_coeffs([](const Scalar& x) { return Dual(Scalar(), x); });
  return r;
}
inline FiberPoly body(const DualFiber& p) {
  return p.map_coeffs([](const Dual& d) { return d.body(); });
}
inline FiberPoly soul(const DualFiber& p) {
  return p.map_coeffs([](const Dual& d) { return d.soul(); });
}
inline FiberPoly body(const FiberPoly& p) { return p; }

template <class C>
std::string Fiber<C>::to_string() const {
  std::string s;
  for (const auto& [k, c] : terms()) {
    if (!s.empty()) s += "\n + ";
    s += "(" + c.to_string() + ")";
    if (!k.is_zero()) s += "*" + monomial_string(k, "zeta", "zetab");
  }
  if (s.empty()) s = "0";
  if (fiber_order_ < kExact) s += "\n + O(fiber^" + std::to_string(fiber_order_ + 1) + ")";
  return s;
}

}  // namespace sepvar
