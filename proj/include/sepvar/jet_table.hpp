#pragma once

#include <map>
#include <utility>

#include "sepvar/jet.hpp"

namespace sepvar {

/// Sparse map from a multi-index to jet coefficients sharing one jet order.
///
/// Shared storage for fiber polynomials (key = fiber monomial) and for the
/// grades of differential operators (key = derivative multi-index).
template <class C>
class JetTable {
 public:
  using Map = std::map<MultiIndex, Jet<C>>;

  JetTable() = default;
  JetTable(int dim, int jet_order) : dim_(dim), jet_order_(jet_order) {}

  int dim() const { return dim_; }
  int jet_order() const { return jet_order_; }
  const Map& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Zero with no truncation anywhere.
  bool is_exact_zero() const { return terms_.empty() && jet_order_ >= kExact; }

  Jet<C> at(const MultiIndex& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? Jet<C>(dim_, jet_order_) : it->second;
  }

  void lower_jet_order(int order) {
    if (order >= jet_order_) return;
    jet_order_ = order;
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second.lower_to(order);
      it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
    }
  }

  /// Adds coefficient c at key; a coarser coefficient lowers the table order.
  void add(const MultiIndex& key, const Jet<C>& c) {
    if (c.dim() != dim_) throw Error(ErrorCode::DimensionMismatch, "coefficient jet of different chart dimension");
    lower_jet_order(c.order());
    if (c.is_zero()) return;
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      Jet<C> t = c;
      t.lower_to(jet_order_);
      if (!t.is_zero()) terms_.emplace(key, std::move(t));
      return;
    }
    it->second += c;
    it->second.lower_to(jet_order_);
    if (it->second.is_zero()) terms_.erase(it);
  }
  void subtract(const MultiIndex& key, const Jet<C>& c) { add(key, -c); }

  void add_table(const JetTable& o, const C& factor) {
    lower_jet_order(o.jet_order_);
    for (const auto& [k, c] : o.terms_) add(k, c * factor);
  }

  void scale(const C& s) {
    if (s.is_zero()) {
      terms_.clear();
      return;
    }
    for (auto& [k, c] : terms_) c *= s;
  }

  bool equals(const JetTable& o) const {
    if (dim_ != o.dim_) return false;
    int common = std::min(jet_order_, o.jet_order_);
    JetTable a = *this, b = o;
    a.lower_jet_order(common);
    b.lower_jet_order(common);
    if (a.terms_.size() != b.terms_.size()) return false;
    for (auto ia = a.terms_.begin(), ib = b.terms_.begin(); ia != a.terms_.end(); ++ia, ++ib)
      if (ia->first != ib->first || ia->second.terms() != ib->second.terms()) return false;
    return true;
  }

  Map& mutable_terms() { return terms_; }

 private:
  int dim_ = 1;
  int jet_order_ = kExact;
  Map terms_;
};

}  // namespace sepvar
