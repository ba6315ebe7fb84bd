#pragma once

#include <string>
#include <utility>

#include "sepvar/scalar.hpp"

namespace sepvar {

/// Dual number body + eps * soul with eps^2 = 0.
///
/// T only needs ring operations. EpsPair<Scalar> is used as a coefficient
/// ring, so every polynomial type instantiated over it computes an
/// infinitesimal deformation alongside its undeformed value.
template <class T>
class EpsPair {
 public:
  EpsPair() = default;
  EpsPair(T body) : body_(std::move(body)) {}  // NOLINT
  EpsPair(T body, T soul) : body_(std::move(body)), soul_(std::move(soul)) {}
  EpsPair(int v) : body_(v), soul_(0) {}  // NOLINT

  const T& body() const { return body_; }
  const T& soul() const { return soul_; }

  bool is_zero() const { return body_.is_zero() && soul_.is_zero(); }

  EpsPair& operator+=(const EpsPair& o) {
    body_ += o.body_;
    soul_ += o.soul_;
    return *this;
  }
  EpsPair& operator-=(const EpsPair& o) {
    body_ -= o.body_;
    soul_ -= o.soul_;
    return *this;
  }
  EpsPair& operator*=(const EpsPair& o) {
    if (o.soul_.is_zero()) {
      body_ *= o.body_;
      soul_ *= o.body_;
      return *this;
    }
    T soul = body_ * o.soul_;
    soul.add_mul(soul_, o.body_);
    body_ *= o.body_;
    soul_ = std::move(soul);
    return *this;
  }

  void add_mul(const EpsPair& a, const EpsPair& b) {
    body_.add_mul(a.body_, b.body_);
    if (!b.soul_.is_zero()) soul_.add_mul(a.body_, b.soul_);
    if (!a.soul_.is_zero()) soul_.add_mul(a.soul_, b.body_);
  }

  /// (a + eps b)^{-1} = a^{-1} - eps b a^{-2}
  EpsPair inverse() const {
    T inv = body_.inverse();
    return EpsPair(inv, -(soul_ * inv * inv));
  }
  EpsPair& operator/=(const EpsPair& o) { return *this *= o.inverse(); }

  friend EpsPair operator+(EpsPair a, const EpsPair& b) { return a += b; }
  friend EpsPair operator-(EpsPair a, const EpsPair& b) { return a -= b; }
  friend EpsPair operator*(EpsPair a, const EpsPair& b) { return a *= b; }
  friend EpsPair operator/(EpsPair a, const EpsPair& b) { return a /= b; }
  friend EpsPair operator-(const EpsPair& a) { return EpsPair(-a.body_, -a.soul_); }
  friend bool operator==(const EpsPair& a, const EpsPair& b) {
    return a.body_ == b.body_ && a.soul_ == b.soul_;
  }

  std::string to_string() const { return body_.to_string() + " + eps*" + soul_.to_string(); }

 private:
  T body_{};
  T soul_{};
};

using Dual = EpsPair<Scalar>;

/// Coefficient-ring traits used by the polynomial templates.
template <class C>
struct CoeffTraits;

template <>
struct CoeffTraits<Scalar> {
  static Scalar from_scalar(const Scalar& s) { return s; }
  static Scalar body(const Scalar& s) { return s; }
  static Scalar soul(const Scalar&) { return Scalar(); }
  static bool is_dual() { return false; }
};

template <>
struct CoeffTraits<Dual> {
  static Dual from_scalar(const Scalar& s) { return Dual(s, Scalar()); }
  static Scalar body(const Dual& d) { return d.body(); }
  static Scalar soul(const Dual& d) { return d.soul(); }
  static bool is_dual() { return true; }
};

}  // namespace sepvar
