#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sepvar/eps_pair.hpp"
#include "sepvar/errors.hpp"
#include "sepvar/multi_index.hpp"
#include "sepvar/scalar.hpp"

namespace sepvar {

/// Truncated Taylor series in (z, zbar) at the chart origin.
///
/// Every stored term has total degree <= order(). Coefficients of degree
/// <= order() are exact; anything above is unknown, so differentiation
/// lowers the order and products take the minimum. order() == kExact marks
/// an exact polynomial.
template <class C>
class Jet {
 public:
  using Coeff = C;
  using Terms = std::map<MultiIndex, C>;

  Jet() = default;
  Jet(int dim, int order) : dim_(dim), order_(order) { check(); }

  static Jet constant(int dim, int order, const C& c) {
    Jet j(dim, order);
    j.add(MultiIndex(), c);
    return j;
  }
  static Jet monomial(int dim, int order, const MultiIndex& m, const C& c = C(1)) {
    Jet j(dim, order);
    j.add(m, c);
    return j;
  }
  static Jet z(int dim, int k, int order = kExact) { return monomial(dim, order, MultiIndex::unit_holo(k)); }
  static Jet zbar(int dim, int l, int order = kExact) { return monomial(dim, order, MultiIndex::unit_anti(l)); }

  int dim() const { return dim_; }
  int order() const { return order_; }
  bool is_exact() const { return order_ >= kExact; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  C coeff(const MultiIndex& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? C() : it->second;
  }
  C constant_term() const { return coeff(MultiIndex()); }

  /// Adds c * m; silently drops terms above the truncation order.
  void add(const MultiIndex& m, const C& c) {
    if (c.is_zero() || m.degree() > order_) return;
    if (m.used_dim() > dim_) throw Error(ErrorCode::DimensionMismatch, "monomial uses a variable beyond the chart dimension");
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Jet truncated(int order) const {
    Jet r(dim_, std::min(order, order_));
    for (const auto& [m, c] : terms_)
      if (m.degree() <= r.order_) r.terms_.emplace(m, c);
    return r;
  }

  /// Same terms, order lowered to `order` if that is smaller.
  void lower_to(int order) {
    if (order >= order_) return;
    order_ = order;
    check();
    std::erase_if(terms_, [&](const auto& kv) { return kv.first.degree() > order_; });
  }

  Jet& operator+=(const Jet& o) {
    same_dim(o);
    lower_to(o.order_);
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    same_dim(o);
    lower_to(o.order_);
    for (const auto& [m, c] : o.terms_) add(m, -c);
    return *this;
  }
  Jet& operator*=(const C& s) {
    if (s.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) {
    for (auto& [m, c] : a.terms_) c = -c;
    return a;
  }
  friend Jet operator*(Jet a, const C& s) { return a *= s; }
  friend Jet operator*(const C& s, Jet a) { return a *= s; }

  /// Truncated Cauchy product; order is the minimum of both orders.
  friend Jet operator*(const Jet& a, const Jet& b) {
    a.same_dim(b);
    if ((a.is_zero() && a.is_exact()) || (b.is_zero() && b.is_exact())) return Jet(a.dim_, kExact);
    Jet r(a.dim_, std::min(a.order_, b.order_));
    if (a.terms_.empty() || b.terms_.empty()) return r;
    std::vector<std::pair<MultiIndex, int>> bk;
    bk.reserve(b.terms_.size());
    for (const auto& [m, c] : b.terms_) bk.emplace_back(m, m.degree());
    for (const auto& [ma, ca] : a.terms_) {
      int da = ma.degree();
      if (da > r.order_) continue;
      auto itb = b.terms_.begin();
      for (std::size_t i = 0; i < bk.size(); ++i, ++itb) {
        if (da + bk[i].second > r.order_) continue;
        r.terms_[ma + bk[i].first].add_mul(ca, itb->second);
      }
    }
    std::erase_if(r.terms_, [](const auto& kv) { return kv.second.is_zero(); });
    return r;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  /// d/dv where v < kMaxDim is z^v and v >= kMaxDim is zbar^(v-kMaxDim).
  Jet derivative(int v) const {
    Jet r(dim_, lower_order(order_));
    for (const auto& [m, c] : terms_) {
      int e = m.var(v);
      if (e == 0) continue;
      MultiIndex d = m;
      d.set_var(v, e - 1);
      r.add(d, c * C(e));
    }
    return r;
  }
  Jet d_holo(int k) const { return derivative(k); }
  Jet d_anti(int l) const { return derivative(kMaxDim + l); }

  /// Mixed partial derivative d^mu.
  Jet derivative(const MultiIndex& mu) const {
    if (mu.is_zero()) return *this;
    Jet r(dim_, lower_order(order_, mu.degree()));
    for (const auto& [m, c] : terms_) {
      if (!mu.divides(m)) continue;
      long f = 1;
      for (int v = 0; v < 2 * kMaxDim; ++v)
        for (int i = 0; i < mu.var(v); ++i) f *= (m.var(v) - i);
      r.add(m - mu, c * C(static_cast<int>(f)));
    }
    return r;
  }

  /// Multiplicative inverse up to the jet order; requires an invertible constant term.
  Jet reciprocal() const {
    C c0 = constant_term();
    if (c0.is_zero()) throw Error(ErrorCode::NonUnitLeading, "jet has zero constant term");
    C inv0 = c0.inverse();
    if (is_exact()) {
      if (terms_.size() == 1) return constant(dim_, kExact, inv0);
      throw Error(ErrorCode::TruncationInsufficient, "reciprocal of an exact polynomial needs a finite order");
    }
    // Homogeneous recursion b_d = -inv0 * sum_{j>=1} a_j b_{d-j}.
    std::vector<Jet> a_hom(order_ + 1, Jet(dim_, order_)), b_hom(order_ + 1, Jet(dim_, order_));
    for (const auto& [m, c] : terms_) a_hom[m.degree()].add(m, c);
    b_hom[0].add(MultiIndex(), inv0);
    for (int d = 1; d <= order_; ++d) {
      Jet acc(dim_, order_);
      for (int j = 1; j <= d; ++j)
        if (!a_hom[j].is_zero() && !b_hom[d - j].is_zero()) acc += a_hom[j] * b_hom[d - j];
      b_hom[d] = acc * (-inv0);
    }
    Jet r(dim_, order_);
    for (const auto& h : b_hom) r += h;
    return r;
  }

  Jet homogeneous(int degree) const {
    Jet r(dim_, order_);
    for (const auto& [m, c] : terms_)
      if (m.degree() == degree) r.terms_.emplace(m, c);
    return r;
  }

  bool is_holomorphic() const {
    for (const auto& [m, c] : terms_)
      if (m.anti_degree() != 0) return false;
    return true;
  }
  bool is_antiholomorphic() const {
    for (const auto& [m, c] : terms_)
      if (m.holo_degree() != 0) return false;
    return true;
  }

  /// Equality up to the common truncation order.
  bool equals(const Jet& o) const {
    if (dim_ != o.dim_) return false;
    int common = std::min(order_, o.order_);
    return truncated(common).terms_ == o.truncated(common).terms_;
  }

  /// Exchanges z and zbar.
  Jet swapped() const {
    Jet r(dim_, order_);
    for (const auto& [m, c] : terms_) r.terms_.emplace(m.swapped(), c);
    return r;
  }

  template <class F>
  auto map_coeffs(F f) const {
    using D = decltype(f(std::declval<const C&>()));
    Jet<D> r(dim_, order_);
    for (const auto& [m, c] : terms_) r.add(m, f(c));
    return r;
  }

  std::string to_string() const;

 private:
  template <class>
  friend class Jet;

  void check() const {
    if (dim_ < 0 || dim_ > kMaxDim) throw Error(ErrorCode::DimensionMismatch, "chart dimension must be in 1..4");
    if (order_ < 0) throw Error(ErrorCode::TruncationInsufficient, "jet order dropped below zero; raise the input jet order");
  }
  void same_dim(const Jet& o) const {
    if (dim_ != o.dim_) throw Error(ErrorCode::DimensionMismatch, "jets of different chart dimension");
  }

  int dim_ = 1;
  int order_ = kExact;
  Terms terms_;
};

using JetSeries = Jet<Scalar>;
using DualJet = Jet<Dual>;

inline DualJet lift(const JetSeries& j) {
  return j.map_coeffs([](const Scalar& s) { return Dual(s); });
}
inline DualJet make_dual(const JetSeries& body, const JetSeries& soul) {
  DualJet r = lift(body);
  r.lower_to(soul.order());
  for (const auto& [m, c] : soul.terms()) r.add(m, Dual(Scalar(), c));
  return r;
}
inline JetSeries body(const DualJet& j) {
  return j.map_coeffs([](const Dual& d) { return d.body(); });
}
inline JetSeries soul(const DualJet& j) {
  return j.map_coeffs([](const Dual& d) { return d.soul(); });
}
inline JetSeries body(const JetSeries& j) { return j; }

/// Human-readable rendering, e.g. "1 - 2*z1*zb1 + O(6)".
std::string monomial_string(const MultiIndex& m, const char* holo_name, const char* anti_name);

template <class C>
std::string Jet<C>::to_string() const {
  std::string s;
  for (const auto& [m, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += c.to_string();
    if (!m.is_zero()) s += "*" + monomial_string(m, "z", "zb");
  }
  if (s.empty()) s = "0";
  if (!is_exact()) s += " + O(" + std::to_string(order_ + 1) + ")";
  return s;
}

}  // namespace sepvar
