#include "sepvar/starprod.hpp"

#include "sepvar/kset.hpp"
#include "sepvar/samples.hpp"

namespace sepvar {

std::string to_string(OpSide s) { return s == OpSide::left ? "left" : "right"; }

OpSide parse_op_side(const std::string& s) {
  if (s == "left") return OpSide::left;
  if (s == "right") return OpSide::right;
  throw Error(ErrorCode::UsageError, "side must be 'left' or 'right', got '" + s + "'");
}

namespace {

// Left operators differentiate along z and commute with the zbar-side
// operators; right operators the other way round.
int deriv_var(OpSide side, int i) { return side == OpSide::left ? i : kMaxDim + i; }
int comm_var(OpSide side, int j) { return side == OpSide::left ? kMaxDim + j : j; }

MultiIndex unit(OpSide side, int i) {
  return side == OpSide::left ? MultiIndex::unit_holo(i) : MultiIndex::unit_anti(i);
}

/// Derivative multi-indices along the derivative variables of `side` of total degree d.
std::vector<MultiIndex> level(int dim, OpSide side, int d) {
  std::vector<MultiIndex> out;
  for (const auto& m : enumerate_total(dim, d, side == OpSide::left ? d : 0, side == OpSide::left ? 0 : d))
    if (m.degree() == d) out.push_back(m);
  return out;
}

std::string jet_key(const JetSeries& f) { return std::to_string(f.order()) + "|" + f.to_string(); }

/// Derivatives of a fixed function, memoized by multi-index.
class DerivativeCache {
 public:
  explicit DerivativeCache(JetSeries f) : f_(std::move(f)) {}
  const JetSeries& operator()(const MultiIndex& mu) {
    auto it = cache_.find(mu);
    if (it == cache_.end()) it = cache_.emplace(mu, f_.derivative(mu)).first;
    return it->second;
  }

 private:
  JetSeries f_;
  std::map<MultiIndex, JetSeries> cache_;
};

/// [A, phi] for a grade table A and multiplication by phi:
/// sum_alpha a_alpha sum_{0 < mu <= alpha} C(alpha, mu) (d^mu phi) d^{alpha - mu}.
DiffOp::Grade commutator_with_function(const DiffOp::Grade& a, DerivativeCache& phi, int dim) {
  DiffOp::Grade out(dim, kExact);
  out.lower_jet_order(a.jet_order());
  for (const auto& [alpha, c] : a.terms()) {
    for (const auto& mu : sub_indices(alpha)) {
      if (mu.is_zero()) continue;
      const JetSeries& d = phi(mu);
      if (d.is_zero() && d.is_exact()) continue;
      out.add(alpha - mu, c * d * Scalar(multi_binomial(alpha, mu)));
    }
  }
  return out;
}

/// The beta-entry of [A, phi] restricted to entries alpha of A.
JetSeries commutator_entry(const std::map<MultiIndex, JetSeries>& a, DerivativeCache& phi, const MultiIndex& beta,
                           int dim) {
  JetSeries out(dim, kExact);
  for (const auto& [alpha, c] : a) {
    if (alpha == beta || !beta.divides(alpha)) continue;
    out += c * phi(alpha - beta) * Scalar(multi_binomial(alpha, beta));
  }
  return out;
}

}  // namespace

StarProduct::StarProduct(PotentialData potential, int nu_order)
    : potential_(std::move(potential)), nu_order_(nu_order) {
  if (nu_order < 0) throw Error(ErrorCode::UsageError, "nu order must be non-negative");
  hessian_ = mixed_hessian(potential_.phi_minus1);
  geometry_ = metric_from_potential(potential_);
  const int n = dim();
  phi_grad_.assign(2, std::vector<std::vector<JetSeries>>(n));
  for (int s = 0; s < 2; ++s)
    for (int j = 0; j < n; ++j)
      for (int t = 0; t <= nu_order_ + 1; ++t)
        phi_grad_[s][j].push_back(potential_.phi(t - 1).derivative(comm_var(static_cast<OpSide>(s), j)));
}

DiffOp StarProduct::mult_op(const JetSeries& f, OpSide side) const {
  auto key = std::make_pair(static_cast<int>(side), jet_key(f));
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->ops.find(key);
    if (it != cache_->ops.end()) return it->second;
  }
  DiffOp op = solve(f, side);
  std::lock_guard<std::mutex> lock(cache_->mutex);
  return cache_->ops.emplace(key, std::move(op)).first->second;
}

DiffOp StarProduct::mult_op(const NuSeries& f, OpSide side) const {
  DiffOp out(dim(), nu_order_);
  for (int j = 0; j < static_cast<int>(f.size()) && j <= nu_order_; ++j)
    out += mult_op(f[j], side).shift_nu(j).truncated_nu(nu_order_);
  return out;
}

DiffOp StarProduct::solve(const JetSeries& f, OpSide side) const {
  const int n = dim();
  const int s_idx = static_cast<int>(side);
  const auto& grad = phi_grad_[s_idx];
  // g^{lk} indexed as (commuting j, derivative i).
  auto ginv = [&](int j, int i) -> const JetSeries& {
    return side == OpSide::left ? geometry_.g(j, i) : geometry_.g(i, j);
  };
  std::vector<DerivativeCache> u0;
  for (int j = 0; j < n; ++j) u0.emplace_back(grad[j][0]);

  DiffOp op = DiffOp::multiplication(f, nu_order_);
  for (int s = 1; s <= nu_order_; ++s) {
    // Grade-s condition: [A_s, u_{j,0}] = W_j with
    // W_j = d_j A_{s-1} - sum_{t>=1} [A_{s-t}, u_{j,t}].
    std::vector<DiffOp::Grade> w;
    for (int j = 0; j < n; ++j) {
      const DiffOp::Grade& prev = op.grade(s - 1);
      DiffOp::Grade wj(n, prev.jet_order() >= kExact ? kExact : lower_order(prev.jet_order()));
      for (const auto& [alpha, c] : prev.terms()) wj.add(alpha, c.derivative(comm_var(side, j)));
      for (int t = 1; t < s; ++t) {
        DerivativeCache ut(grad[j][t]);
        wj.add_table(commutator_with_function(op.grade(s - t), ut, n), Scalar(-1));
      }
      w.push_back(std::move(wj));
    }
    for (int j = 0; j < n; ++j)
      for (const auto& [beta, c] : w[j].terms())
        if (beta.degree() >= s)
          throw Error(ErrorCode::InconsistentRecursion,
                      "grade " + std::to_string(s) + ": commutation condition has a term of order " +
                          std::to_string(beta.degree()));

    std::map<MultiIndex, JetSeries> known;
    for (int m = s; m >= 1; --m) {
      std::map<MultiIndex, JetSeries> found;
      for (const auto& beta : level(n, side, m - 1)) {
        std::vector<JetSeries> rhs;
        for (int j = 0; j < n; ++j) rhs.push_back(w[j].at(beta) - commutator_entry(known, u0[j], beta, n));
        for (int i = 0; i < n; ++i) {
          JetSeries c(n, kExact);
          for (int j = 0; j < n; ++j) c += ginv(j, i) * rhs[j];
          MultiIndex alpha = beta + unit(side, i);
          c *= Scalar::rational(1, alpha.var(deriv_var(side, i)));
          auto [it, inserted] = found.emplace(alpha, c);
          if (!inserted && !it->second.equals(c))
            throw Error(ErrorCode::InconsistentRecursion,
                        "grade " + std::to_string(s) + ": coefficient determined inconsistently");
          if (!inserted && c.order() < it->second.order()) it->second = c;
        }
      }
      known.insert(found.begin(), found.end());
    }
    int order = kExact;
    for (const auto& [alpha, c] : known) order = std::min(order, c.order());
    for (const auto& wj : w) order = std::min(order, lower_order(wj.jet_order()));
    op.grade(s).lower_jet_order(order);
    for (const auto& [alpha, c] : known) op.add_term(s, alpha, c);
  }
  return op;
}

NuSeries apply_series(const DiffOp& a, const NuSeries& f) {
  const int r = a.nu_order();
  NuSeries out(r + 1, JetSeries(a.dim(), kExact));
  for (int i = 0; i <= r; ++i)
    for (int j = 0; i + j <= r && j < static_cast<int>(f.size()); ++j) out[i + j] += a.apply_grade(i, f[j]);
  return out;
}

NuSeries star_multiply(const StarProduct& sp, const JetSeries& f, const JetSeries& g) {
  return sp.mult_op(f, OpSide::left).apply(g);
}

NuSeries star_multiply(const StarProduct& sp, const NuSeries& f, const NuSeries& g) {
  const int r = sp.nu_order();
  NuSeries out(r + 1, JetSeries(sp.dim(), kExact));
  for (int i = 0; i <= r && i < static_cast<int>(f.size()); ++i) {
    DiffOp l = sp.mult_op(f[i], OpSide::left);
    for (int j = 0; i + j <= r && j < static_cast<int>(g.size()); ++j)
      for (int k = 0; i + j + k <= r; ++k) out[i + j + k] += l.apply_grade(k, g[j]);
  }
  return out;
}

JetSeries star_component(const StarProduct& sp, int r, const JetSeries& f, const JetSeries& g) {
  return sp.mult_op(f, OpSide::left).apply_grade(r, g);
}

DiffOp materialize(int dim, int nu_order, const std::function<JetSeries(int, const MultiIndex&)>& act) {
  DiffOp op(dim, nu_order);
  for (int r = 0; r <= nu_order; ++r) {
    std::vector<MultiIndex> idx = enumerate_indices(dim, r, r);
    std::stable_sort(idx.begin(), idx.end(), [](const MultiIndex& a, const MultiIndex& b) {
      return a.degree() < b.degree();
    });
    std::vector<std::pair<MultiIndex, JetSeries>> found;
    int order = kExact;
    for (const auto& m : idx) {
      JetSeries mono = JetSeries::monomial(dim, kExact, m);
      JetSeries value = act(r, m);
      for (const auto& [m2, c] : found)
        if (m2.divides(m)) value -= c * mono.derivative(m2);
      value *= Scalar::rational(1, m.factorial());
      order = std::min(order, value.order());
      found.emplace_back(m, std::move(value));
    }
    op.grade(r).lower_jet_order(order);
    for (const auto& [m, c] : found) op.add_term(r, m, c);
  }
  return op;
}

DiffOp berezin(const StarProduct& sp) {
  const int n = sp.dim();
  return materialize(n, sp.nu_order(), [&](int r, const MultiIndex& m) {
    JetSeries a = JetSeries::monomial(n, kExact, MultiIndex::from(m.holo_vector(n), {}));
    JetSeries b = JetSeries::monomial(n, kExact, MultiIndex::from({}, m.anti_vector(n)));
    return sp.mult_op(b, OpSide::left).apply_grade(r, a);
  });
}

DiffOp op_log_series(const DiffOp& b) {
  const int r = b.nu_order();
  DiffOp delta = b - DiffOp::identity(b.dim(), r);
  if (!delta.grade(0).empty())
    throw Error(ErrorCode::DivisibilityError, "operator logarithm needs B = I + O(nu)");
  DiffOp out(b.dim(), r);
  DiffOp power = delta;
  for (int m = 1; m <= r; ++m) {
    out += power * Scalar::rational(m % 2 == 1 ? 1 : -1, m);
    if (m < r) power = op_compose(power, delta);
  }
  return out;
}

DiffOp op_inverse(const DiffOp& b) {
  const int r = b.nu_order();
  DiffOp delta = b - DiffOp::identity(b.dim(), r);
  if (!delta.grade(0).empty()) throw Error(ErrorCode::DivisibilityError, "operator inverse needs B = I + O(nu)");
  DiffOp out = DiffOp::identity(b.dim(), r);
  DiffOp power = DiffOp::identity(b.dim(), r);
  for (int m = 1; m <= r; ++m) {
    power = op_compose(power, delta) * Scalar(-1);
    out += power;
  }
  return out;
}

DiffOp operator_log(const DiffOp& b) {
  DiffOp x = op_log_series(b).shift_nu(1);
  NaturalityReport rep = naturality_report(x, true);
  if (!rep.pass()) {
    for (const auto& row : rep.rows)
      if (!row.ok)
        throw Error(ErrorCode::NotNatural, "operator logarithm: grade " + std::to_string(row.grade) + " has order " +
                                               std::to_string(row.order) + " > " + std::to_string(row.bound));
  }
  return x;
}

ParityResult parity_hat(const DiffOp& x) {
  DiffOp hat = x;
  for (int k = 1; k <= hat.nu_order(); k += 2) hat.grade(k).scale(Scalar(-1));
  DiffOp diff = x - hat;
  for (int k = 0; k <= diff.nu_order(); ++k) diff.grade(k).scale(Scalar::rational(1, 2));
  return {hat, diff.divide_nu()};
}

DualBerezinReport dual_berezin_check(const StarProduct& sp, int samples, std::uint64_t seed) {
  const int n = sp.dim();
  const int r = sp.nu_order();
  DualBerezinReport rep;
  DiffOp b = berezin(sp);
  DiffOp b_inv = op_inverse(b);
  auto dual_star = [&](const NuSeries& u, const NuSeries& v) {
    return apply_series(b_inv, star_multiply(sp, apply_series(b, v), apply_series(b, u)));
  };
  // B~(ab) = b *~ a for holomorphic a and antiholomorphic b.
  std::map<MultiIndex, NuSeries> values;
  for (const auto& m : enumerate_indices(n, r, r)) {
    JetSeries a = JetSeries::monomial(n, kExact, MultiIndex::from(m.holo_vector(n), {}));
    JetSeries bb = JetSeries::monomial(n, kExact, MultiIndex::from({}, m.anti_vector(n)));
    values.emplace(m, dual_star(NuSeries{bb}, NuSeries{a}));
  }
  rep.b_dual = materialize(n, r, [&](int g, const MultiIndex& m) { return values.at(m)[g]; });

  DiffOp comp = op_compose(rep.b_dual, b);
  if (!comp.equals(DiffOp::identity(n, r))) {
    rep.inverse_ok = false;
    rep.failures.push_back("dual Berezin transform does not invert B");
  }
  SampleGenerator gen(seed);
  for (int i = 0; i < samples; ++i) {
    JetSeries u = gen.polynomial(n, 3, kExact, 3), v = gen.polynomial(n, 3, kExact, 3);
    NuSeries prod = dual_star(NuSeries{u}, NuSeries{v});
    if (prod.size() > 1) {
      JetSeries expected(n, kExact);
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) expected -= sp.geometry().g(l, k) * u.d_anti(l) * v.d_holo(k);
      if (!prod[1].equals(expected)) {
        rep.c1_ok = false;
        rep.failures.push_back("dual C_1 differs from -g^{lk} dbar_l u d_k v on sample " + std::to_string(i));
      }
    }
    NuSeries round_trip = apply_series(rep.b_dual, b.apply(u));
    for (int g = 0; g < static_cast<int>(round_trip.size()); ++g)
      if (!round_trip[g].equals(g == 0 ? u : JetSeries(n, kExact))) {
        rep.inverse_ok = false;
        rep.failures.push_back("dual Berezin transform does not invert B on sample " + std::to_string(i));
        break;
      }
    NuSeries one_u = dual_star(NuSeries{JetSeries::constant(n, kExact, Scalar(1))}, NuSeries{u});
    for (int g = 0; g < static_cast<int>(one_u.size()); ++g)
      if (!one_u[g].equals(g == 0 ? u : JetSeries(n, kExact))) {
        rep.unit_ok = false;
        rep.failures.push_back("1 is not a unit of the dual product on sample " + std::to_string(i));
        break;
      }
  }
  rep.pass = rep.inverse_ok && rep.c1_ok && rep.unit_ok;
  return rep;
}

FiberPoly pair_s1(const StarProduct& sp, const StarProduct& sp_tilde, const JetSeries& f, Side side) {
  if (sp.dim() != sp_tilde.dim() || !sp.potential().phi_minus1.equals(sp_tilde.potential().phi_minus1))
    throw Error(ErrorCode::SharedBodyViolation, "pair_s1: the two products have different Phi_{-1}");
  OpSide s = side == Side::source ? OpSide::left : OpSide::right;
  DiffOp diff = sp.mult_op(f, s) - sp_tilde.mult_op(f, s);
  return sigma_symbol(diff.divide_nu());
}

SourceTargetMap pair_map(const StarProduct& sp, const StarProduct& sp_tilde, Side side) {
  if (sp.nu_order() < 1 || sp_tilde.nu_order() < 1)
    throw Error(ErrorCode::TruncationInsufficient, "pair_map needs nu order >= 1");
  SourceTargetMap m;
  m.dim = sp.dim();
  m.side = side;
  m.fiber_order = std::min(sp.nu_order(), sp_tilde.nu_order()) - 1;
  m.deformed = true;
  m.eval = [sp, sp_tilde, side, order = m.fiber_order](const JetSeries& f) {
    OpSide s = side == Side::source ? OpSide::left : OpSide::right;
    FiberPoly body = sigma_symbol(sp.mult_op(f, s)).truncated_fiber(order);
    return make_dual(body, pair_s1(sp, sp_tilde, f, side).truncated_fiber(order));
  };
  return m;
}

DeformedGeometry h_from_x3(const DiffOp& x) {
  if (x.nu_order() < 3) throw Error(ErrorCode::TruncationInsufficient, "h_from_x3 needs X through grade 3");
  const int n = x.dim();
  auto read = [&](int grade, const Scalar& factor, const char* name) {
    JetMatrix<Scalar> m(n, std::vector<JetSeries>(n, JetSeries(n, x.grade(grade).jet_order())));
    for (const auto& [idx, c] : x.grade(grade).terms()) {
      if (idx.holo_degree() != 1 || idx.anti_degree() != 1)
        throw Error(ErrorCode::ShapeViolation, std::string(name) + " has a term outside the mixed second derivatives");
      int k = 0, l = 0;
      while (idx.holo(k) == 0) ++k;
      while (idx.anti(l) == 0) ++l;
      m[l][k] = c * factor;
    }
    return m;
  };
  Geometry base(read(2, Scalar(1), "X_2"));
  return DeformedGeometry(std::move(base), read(3, Scalar(2), "X_3"));
}

SigmaYReport sigma_y_pipeline(const PotentialData& p, int n, int r) {
  if (r < n + 1) throw Error(ErrorCode::UsageError, "sigma_y_pipeline needs nu order R >= N + 1");
  SigmaYReport rep;
  StarProduct sp(p, r - 1);
  rep.x = operator_log(berezin(sp));
  DiffOp y = parity_hat(rep.x).y;
  rep.sigma_y = sigma_symbol(y).truncated_fiber(n);

  DeformedGeometry read = h_from_x3(rep.x);
  for (int l = 0; l < sp.dim(); ++l)
    for (int k = 0; k < sp.dim(); ++k)
      if (!read.base().g(l, k).equals(sp.geometry().g(l, k)))
        throw Error(ErrorCode::InconsistentRecursion, "X_2 does not reproduce the metric");
  rep.deformation = DeformedGeometry(sp.geometry(), read.h_upper());
  FElement f = solve_F(rep.deformation, n);
  rep.half_j = f.j() * Scalar::rational(1, 2);
  rep.residual = rep.sigma_y - rep.half_j;
  rep.fiber_order = std::min(rep.sigma_y.fiber_order(), rep.half_j.fiber_order());
  rep.pass = true;
  for (int d = 0; d <= rep.fiber_order; ++d) {
    bool ok = rep.residual.homogeneous(d).is_zero();
    rep.degree_ok.emplace_back(d, ok);
    rep.pass = rep.pass && ok;
  }
  return rep;
}

}  // namespace sepvar
