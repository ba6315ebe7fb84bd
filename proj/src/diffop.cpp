#include "sepvar/diffop.hpp"

#include <algorithm>
#include <map>

namespace sepvar {

namespace {

int max_index_degree(const DiffOp::Grade& g) {
  int d = -1;
  for (const auto& [idx, c] : g.terms()) d = std::max(d, idx.degree());
  return d;
}

/// Jet order of a product of grades, per the Leibniz expansion.
int product_jet_order(const DiffOp::Grade& a, const DiffOp::Grade& b) {
  return std::min(a.jet_order(), lower_order(b.jet_order(), std::max(0, max_index_degree(a))));
}

void compose_grades(const DiffOp::Grade& a, const DiffOp::Grade& b, DiffOp::Grade& out) {
  if (a.is_exact_zero() || b.is_exact_zero()) return;
  out.lower_jet_order(product_jet_order(a, b));
  std::map<std::pair<MultiIndex, MultiIndex>, JetSeries> derivative_cache;
  for (const auto& [gamma, ca] : a.terms()) {
    for (const auto& mu : sub_indices(gamma)) {
      Scalar binom(static_cast<long>(multi_binomial(gamma, mu)));
      MultiIndex rest = gamma - mu;
      for (const auto& [delta, cb] : b.terms()) {
        auto key = std::make_pair(delta, mu);
        auto it = derivative_cache.find(key);
        if (it == derivative_cache.end()) it = derivative_cache.emplace(key, cb.derivative(mu)).first;
        if (it->second.is_zero()) continue;
        out.add(rest + delta, (ca * it->second) * binom);
      }
    }
  }
}

}  // namespace

DiffOp::DiffOp(int dim, int nu_order) : dim_(dim) {
  if (nu_order < 0) throw Error(ErrorCode::TruncationInsufficient, "nu order dropped below zero");
  grades_.assign(nu_order + 1, Grade(dim, kExact));
}

DiffOp DiffOp::identity(int dim, int nu_order) {
  DiffOp op(dim, nu_order);
  op.add_term(0, MultiIndex(), JetSeries::constant(dim, kExact, Scalar(1)));
  return op;
}

DiffOp DiffOp::multiplication(const JetSeries& f, int nu_order) {
  DiffOp op(f.dim(), nu_order);
  op.grades_[0].lower_jet_order(f.order());
  op.add_term(0, MultiIndex(), f);
  return op;
}

DiffOp DiffOp::term(int grade, const MultiIndex& index, const JetSeries& coeff, int nu_order) {
  DiffOp op(coeff.dim(), nu_order);
  if (grade <= nu_order) {
    op.grades_[grade].lower_jet_order(coeff.order());
    op.add_term(grade, index, coeff);
  }
  return op;
}

void DiffOp::add_term(int r, const MultiIndex& index, const JetSeries& coeff) {
  if (r > nu_order()) return;
  grades_.at(r).add(index, coeff);
}

int DiffOp::grade_order(int r) const { return max_index_degree(grades_.at(r)); }

int DiffOp::min_grade() const {
  for (int r = 0; r <= nu_order(); ++r)
    if (!grades_[r].empty()) return r;
  return nu_order() + 1;
}

int DiffOp::jet_order() const {
  int o = kExact;
  for (const auto& g : grades_) o = std::min(o, g.jet_order());
  return o;
}

JetSeries DiffOp::apply_grade(int r, const JetSeries& f) const {
  if (f.dim() != dim_) throw Error(ErrorCode::DimensionMismatch, "operator and jet of different dimension");
  const Grade& g = grades_.at(r);
  if (g.is_exact_zero() || (f.is_zero() && f.is_exact())) return JetSeries(dim_, kExact);
  JetSeries out(dim_, std::min(g.jet_order(), lower_order(f.order(), std::max(0, max_index_degree(g)))));
  for (const auto& [idx, c] : g.terms()) out += c * f.derivative(idx);
  out.lower_to(std::min(g.jet_order(), lower_order(f.order(), std::max(0, max_index_degree(g)))));
  return out;
}

NuSeries DiffOp::apply(const JetSeries& f) const {
  NuSeries out;
  out.reserve(grades_.size());
  for (int r = 0; r <= nu_order(); ++r) out.push_back(apply_grade(r, f));
  return out;
}

DiffOp& DiffOp::operator+=(const DiffOp& o) {
  if (o.dim_ != dim_) throw Error(ErrorCode::DimensionMismatch, "operators of different dimension");
  if (o.nu_order() < nu_order()) grades_.resize(o.nu_order() + 1);
  for (int r = 0; r <= nu_order(); ++r) grades_[r].add_table(o.grades_[r], Scalar(1));
  return *this;
}

DiffOp& DiffOp::operator-=(const DiffOp& o) {
  if (o.dim_ != dim_) throw Error(ErrorCode::DimensionMismatch, "operators of different dimension");
  if (o.nu_order() < nu_order()) grades_.resize(o.nu_order() + 1);
  for (int r = 0; r <= nu_order(); ++r) grades_[r].add_table(o.grades_[r], Scalar(-1));
  return *this;
}

DiffOp& DiffOp::operator*=(const Scalar& s) {
  for (auto& g : grades_) g.scale(s);
  return *this;
}

DiffOp DiffOp::shift_nu(int k) const {
  DiffOp out(dim_, nu_order() + k);
  for (int r = 0; r <= nu_order(); ++r) out.grades_[r + k] = grades_[r];
  return out;
}

DiffOp DiffOp::divide_nu() const {
  if (!grades_[0].empty())
    throw Error(ErrorCode::DivisibilityError, "operator has a nonzero nu^0 grade and is not divisible by nu");
  if (nu_order() < 1) throw Error(ErrorCode::TruncationInsufficient, "dividing by nu needs nu order >= 1");
  DiffOp out(dim_, nu_order() - 1);
  for (int r = 1; r <= nu_order(); ++r) out.grades_[r - 1] = grades_[r];
  return out;
}

DiffOp DiffOp::truncated_nu(int order) const {
  DiffOp out = *this;
  if (order < nu_order()) out.grades_.resize(order + 1);
  return out;
}

bool DiffOp::equals(const DiffOp& o) const {
  if (dim_ != o.dim_) return false;
  int common = std::min(nu_order(), o.nu_order());
  for (int r = 0; r <= common; ++r)
    if (!grades_[r].equals(o.grades_[r])) return false;
  return true;
}

std::string DiffOp::to_string() const {
  std::string s;
  for (int r = 0; r <= nu_order(); ++r) {
    for (const auto& [idx, c] : grades_[r].terms()) {
      if (!s.empty()) s += "\n + ";
      s += "nu^" + std::to_string(r) + " (" + c.to_string() + ")";
      if (!idx.is_zero()) s += "*D[" + monomial_string(idx, "z", "zb") + "]";
    }
  }
  return s.empty() ? "0" : s;
}

DiffOp op_compose(const DiffOp& a, const DiffOp& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "op_compose: dimension mismatch");
  int ra = a.nu_order(), rb = b.nu_order();
  int r = std::min(ra + b.min_grade(), rb + a.min_grade());
  r = std::min(r, std::max(ra, rb));
  DiffOp out(a.dim(), r);
  for (int s = 0; s <= r; ++s)
    for (int r1 = 0; r1 <= std::min(s, ra); ++r1) {
      int r2 = s - r1;
      if (r2 > rb) continue;
      compose_grades(a.grade(r1), b.grade(r2), out.grade(s));
    }
  return out;
}

DiffOp commutator_over_nu(const DiffOp& a, const DiffOp& b) {
  DiffOp c = op_compose(a, b) - op_compose(b, a);
  return c.divide_nu();
}

NaturalityReport naturality_report(const DiffOp& a, bool sharp_bound) {
  NaturalityReport rep;
  rep.checked_sharp = sharp_bound;
  for (int r = 0; r <= a.nu_order(); ++r) {
    int ord = a.grade_order(r);
    bool ok = ord <= r;
    rep.natural = rep.natural && ok;
    int bound = r;
    if (sharp_bound) {
      bound = 2 * (r / 2);
      bool sharp_ok = ord <= bound;
      rep.sharp = rep.sharp && sharp_ok;
      ok = ok && sharp_ok;
    }
    rep.rows.push_back({r, ord, bound, ok});
  }
  return rep;
}

FiberPoly sigma_symbol(const DiffOp& a) {
  auto rep = naturality_report(a);
  if (!rep.natural) {
    for (const auto& row : rep.rows)
      if (!row.ok)
        throw Error(ErrorCode::NotNatural, "grade " + std::to_string(row.grade) + " has order " +
                                               std::to_string(row.order) + " > " + std::to_string(row.grade));
  }
  FiberPoly out(a.dim(), kExact, a.nu_order());
  for (int r = 0; r <= a.nu_order(); ++r) {
    out.lower_jet_order(a.grade(r).jet_order());
    for (const auto& [idx, c] : a.grade(r).terms())
      if (idx.degree() == r) out.add(idx, c);
  }
  return out;
}

}  // namespace sepvar
