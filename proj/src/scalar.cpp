#include "sepvar/scalar.hpp"

#include "sepvar/errors.hpp"

namespace sepvar {

namespace {

mpq_class parse_rational(std::string_view text) {
  std::string s(text);
  auto slash = s.find('/');
  mpz_class num, den = 1;
  auto bad = [&] { return Error(ErrorCode::ParseError, "malformed rational \"" + s + "\""); };
  auto valid_int = [](const std::string& t) {
    if (t.empty()) return false;
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  std::string ns = s.substr(0, slash);
  if (!valid_int(ns)) throw bad();
  if (ns[0] == '+') ns.erase(0, 1);
  num.set_str(ns, 10);
  if (slash != std::string::npos) {
    std::string ds = s.substr(slash + 1);
    if (!valid_int(ds) || ds[0] == '-' || ds[0] == '+') throw bad();
    den.set_str(ds, 10);
    if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator in \"" + s + "\"");
  }
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace

Scalar Scalar::rational(long num, long den) {
  if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator");
  mpq_class q(num, den);
  q.canonicalize();
  return Scalar(q);
}

Scalar Scalar::parse(std::string_view re, std::string_view im) {
  return Scalar(parse_rational(re), parse_rational(im));
}

Scalar& Scalar::operator*=(const Scalar& o) {
  if (sgn(im_) == 0 && sgn(o.im_) == 0) {
    re_ *= o.re_;
    return *this;
  }
  mpq_class re = re_ * o.re_ - im_ * o.im_;
  mpq_class im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

void Scalar::add_mul(const Scalar& a, const Scalar& b) {
  thread_local mpq_class t;
  if (sgn(a.im_) == 0 && sgn(b.im_) == 0) {
    mpq_mul(t.get_mpq_t(), a.re_.get_mpq_t(), b.re_.get_mpq_t());
    mpq_add(re_.get_mpq_t(), re_.get_mpq_t(), t.get_mpq_t());
    return;
  }
  *this += a * b;
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw Error(ErrorCode::NonUnitLeading, "division by zero scalar");
  if (sgn(im_) == 0) return Scalar(mpq_class(1) / re_);
  mpq_class norm = re_ * re_ + im_ * im_;
  return Scalar(re_ / norm, -im_ / norm);
}

std::string Scalar::to_string() const {
  if (sgn(im_) == 0) return re_.get_str();
  return "(" + re_.get_str() + (sgn(im_) < 0 ? "-" : "+") + mpq_class(abs(im_)).get_str() + "i)";
}

}  // namespace sepvar
