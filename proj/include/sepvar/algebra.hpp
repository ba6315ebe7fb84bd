#pragma once

#include <map>
#include <optional>

#include "sepvar/diffop.hpp"
#include "sepvar/fiber.hpp"
#include "sepvar/jet.hpp"

namespace sepvar {

/// e^{H_K} Q = sum_m H_K^m Q / m! with H_K Q = {K, Q}.
///
/// K must start at fiber degree >= 2 so that every application of H_K
/// raises the fiber degree; the series is cut at `fiber_order` (when
/// given) or at the truncation order that the inputs support.
template <class C>
Fiber<C> ham_exp(const Fiber<C>& k, const Fiber<C>& q, std::optional<int> fiber_order = std::nullopt) {
  if (!k.is_zero() && k.min_degree() < 2)
    throw Error(ErrorCode::FiberDegreeTooLow, "ham_exp: Hamiltonian has terms of fiber degree < 2");
  int cap = fiber_order.value_or(q.fiber_order());
  if (cap >= kExact && !k.is_zero())
    throw Error(ErrorCode::TruncationInsufficient, "ham_exp: an explicit fiber order is needed for exact inputs");
  Fiber<C> term = q.truncated_fiber(cap);
  Fiber<C> sum = term;
  // Each application raises the fiber degree by at least mindeg K - 1.
  const int step = k.is_zero() ? 1 : k.min_degree() - 1;
  for (int m = 1; !term.is_zero() && term.min_degree() + step <= cap; ++m) {
    term = poisson_bracket(k, term);
    term.lower_fiber_order(std::min(cap, term.fiber_order()));
    term *= C(Scalar::rational(1, m));
    sum += term;
  }
  return sum;
}

/// The restriction E to the zero section.
template <class C>
Jet<C> zero_section(const Fiber<C>& p) {
  return p.zero_section();
}

/// First-order operator sum_v X^v d/dv on T*M with fiber-polynomial
/// coefficients, differentiating only along the base variables.
/// Keys v < kMaxDim are z^v, v >= kMaxDim are zbar^(v-kMaxDim).
template <class C>
class VectorField {
 public:
  explicit VectorField(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  const std::map<int, Fiber<C>>& components() const { return comps_; }

  void add(int v, const Fiber<C>& coeff) {
    auto it = comps_.find(v);
    if (it == comps_.end())
      comps_.emplace(v, coeff);
    else
      it->second += coeff;
  }

  Fiber<C> apply(const Fiber<C>& p) const {
    Fiber<C> out(dim_, kExact, kExact);
    for (const auto& [v, c] : comps_) out += c * p.d_base(v);
    return out;
  }

  /// [X, Y] = sum_v (X(Y^v) - Y(X^v)) d/dv
  friend VectorField bracket(const VectorField& x, const VectorField& y) {
    VectorField out(x.dim_);
    std::map<int, bool> keys;
    for (const auto& [v, c] : x.comps_) keys[v] = true;
    for (const auto& [v, c] : y.comps_) keys[v] = true;
    for (const auto& [v, unused] : keys) {
      Fiber<C> comp(x.dim_, kExact, kExact);
      if (auto it = y.comps_.find(v); it != y.comps_.end()) comp += x.apply(it->second);
      if (auto it = x.comps_.find(v); it != x.comps_.end()) comp -= y.apply(it->second);
      out.comps_.emplace(v, comp);
    }
    return out;
  }

  VectorField& operator+=(const VectorField& o) {
    for (const auto& [v, c] : o.comps_) add(v, c);
    return *this;
  }
  VectorField& operator*=(const C& s) {
    for (auto& [v, c] : comps_) c *= s;
    return *this;
  }
  void truncate_fiber(int order) {
    for (auto& [v, c] : comps_) c.lower_fiber_order(order);
  }
  bool is_zero() const {
    for (const auto& [v, c] : comps_)
      if (!c.is_zero()) return false;
    return true;
  }
  int min_degree() const {
    int d = kExact;
    for (const auto& [v, c] : comps_) d = std::min(d, c.min_degree());
    return d;
  }

 private:
  int dim_;
  std::map<int, Fiber<C>> comps_;
};

/// e^X p = sum_m X^m p / m!, cut at fiber degree `fiber_order`; X must raise
/// the fiber degree by at least one.
template <class C>
Fiber<C> vf_exp(const VectorField<C>& x, const Fiber<C>& p, int fiber_order) {
  Fiber<C> term = p.truncated_fiber(fiber_order);
  Fiber<C> sum = term;
  const int step = x.is_zero() ? 1 : x.min_degree();
  for (int m = 1; !term.is_zero() && term.min_degree() + step <= fiber_order; ++m) {
    term = x.apply(term);
    term.lower_fiber_order(std::min(fiber_order, term.fiber_order()));
    term *= C(Scalar::rational(1, m));
    sum += term;
  }
  return sum;
}

}  // namespace sepvar
