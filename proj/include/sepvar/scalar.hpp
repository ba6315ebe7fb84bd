#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace sepvar {

/// Exact Gaussian rational re + i*im.
class Scalar {
 public:
  Scalar() = default;
  Scalar(long v) : re_(v) {}  // NOLINT(google-explicit-constructor)
  Scalar(int v) : re_(v) {}   // NOLINT(google-explicit-constructor)
  Scalar(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  static Scalar rational(long num, long den);
  /// Parses "p", "p/q" or "-p/q"; throws Error(ParseError) on a zero denominator.
  static Scalar parse(std::string_view re, std::string_view im = "0");

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  Scalar& operator+=(const Scalar& o) {
    re_ += o.re_;
    if (sgn(o.im_) != 0) im_ += o.im_;
    return *this;
  }
  Scalar& operator-=(const Scalar& o) {
    re_ -= o.re_;
    if (sgn(o.im_) != 0) im_ -= o.im_;
    return *this;
  }
  Scalar& operator*=(const Scalar& o);
  /// *this += a * b without temporaries.
  void add_mul(const Scalar& a, const Scalar& b);
  Scalar& operator/=(const Scalar& o) { return *this *= o.inverse(); }

  Scalar inverse() const;
  Scalar conj() const { return Scalar(re_, -im_); }

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
  friend Scalar operator-(const Scalar& a) { return Scalar(-a.re_, -a.im_); }
  friend bool operator==(const Scalar& a, const Scalar& b) { return a.re_ == b.re_ && a.im_ == b.im_; }

  static std::string rational_string(const mpq_class& q) { return q.get_str(); }
  std::string to_string() const;

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

}  // namespace sepvar
