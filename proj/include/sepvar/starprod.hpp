#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "sepvar/diffop.hpp"
#include "sepvar/geometry.hpp"
#include "sepvar/groupoid.hpp"

namespace sepvar {

enum class OpSide { left, right };

std::string to_string(OpSide s);
OpSide parse_op_side(const std::string& s);

/// Star product with separation of variables determined by a potential
/// Phi = (1/nu) Phi_{-1} + Phi_0 + nu Phi_1 + ..., known through nu^R.
///
/// L_f has only holomorphic derivatives and commutes with
/// d Phi / dzbar^l + d/dzbar^l; R_f is the mirror image. Operators are
/// cached per function; the cache is guarded by a mutex.
class StarProduct {
 public:
  StarProduct(PotentialData potential, int nu_order);

  int dim() const { return potential_.dim(); }
  int nu_order() const { return nu_order_; }
  const PotentialData& potential() const { return potential_; }
  const Geometry& geometry() const { return geometry_; }

  /// L_f (left) or R_f (right).
  DiffOp mult_op(const JetSeries& f, OpSide side) const;
  /// The same for a nu-series f_0 + nu f_1 + ...
  DiffOp mult_op(const NuSeries& f, OpSide side) const;

 private:
  DiffOp solve(const JetSeries& f, OpSide side) const;

  PotentialData potential_;
  int nu_order_;
  JetMatrix<Scalar> hessian_;  // [k][l] = d^2 Phi_{-1} / dz^k dzbar^l
  Geometry geometry_;
  // phi_grad_[side][j][t] = derivative of Phi_{t-1} along the j-th commuting variable
  std::vector<std::vector<std::vector<JetSeries>>> phi_grad_;

  struct Cache {
    std::mutex mutex;
    std::map<std::pair<int, std::string>, DiffOp> ops;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

inline DiffOp left_mult_op(const StarProduct& sp, const JetSeries& f, OpSide side = OpSide::left) {
  return sp.mult_op(f, side);
}

/// f * g = sum_r nu^r C_r(f, g)
NuSeries star_multiply(const StarProduct& sp, const JetSeries& f, const JetSeries& g);
/// Product of two nu-series, truncated at the product's nu order.
NuSeries star_multiply(const StarProduct& sp, const NuSeries& f, const NuSeries& g);
/// C_r(f, g)
JetSeries star_component(const StarProduct& sp, int r, const JetSeries& f, const JetSeries& g);

/// Formal Berezin transform: B(z^alpha zbar^beta) = zbar^beta * z^alpha,
/// known through the product's nu order.
DiffOp berezin(const StarProduct& sp);

/// Operator materialized from its action on monomials: `act(r, m)` returns
/// grade r applied to the monomial z^m; grade r is assumed to have
/// holomorphic and antiholomorphic derivative orders <= r.
DiffOp materialize(int dim, int nu_order, const std::function<JetSeries(int, const MultiIndex&)>& act);

/// A applied to a nu-series; missing terms of f count as zero.
NuSeries apply_series(const DiffOp& a, const NuSeries& f);

/// X = nu log B; known through grade B.nu_order() + 1. Throws NotNatural
/// unless X satisfies the sharp order bound.
DiffOp operator_log(const DiffOp& b);

/// sum_m (-1)^{m+1} (B - I)^m / m
DiffOp op_log_series(const DiffOp& b);
/// B^{-1} as a nu-series in B - I.
DiffOp op_inverse(const DiffOp& b);

struct ParityResult {
  DiffOp x_hat;
  DiffOp y;
};

/// X_hat_k = (-1)^k X_k and Y = (X - X_hat) / (2 nu).
ParityResult parity_hat(const DiffOp& x);

struct DualBerezinReport {
  bool pass = true;
  bool inverse_ok = true;  // B_dual o B = I
  bool c1_ok = true;       // dual C_1 = -g^{lk} dbar_l u d_k v on samples
  bool unit_ok = true;
  DiffOp b_dual;
  std::vector<std::string> failures;
};

/// Builds u *~ v = B^{-1}(Bv * Bu), its Berezin transform from the
/// definition, and checks that it inverts B.
DualBerezinReport dual_berezin_check(const StarProduct& sp, int samples = 3, std::uint64_t seed = 1);

/// S_1 f = sigma((1/nu)(L_f - L~_f)) (target side: R_f).
FiberPoly pair_s1(const StarProduct& sp, const StarProduct& sp_tilde, const JetSeries& f, Side side);

/// f -> sigma(L_f) + eps pair_s1(f) (target: R_f), fiber order R - 1.
SourceTargetMap pair_map(const StarProduct& sp, const StarProduct& sp_tilde, Side side);

/// h^{lk} = 2 * coefficient of d^2/dz^k dzbar^l in X_3; g^{lk} from X_2.
DeformedGeometry h_from_x3(const DiffOp& x);

struct SigmaYReport {
  bool pass = false;
  int fiber_order = 0;
  FiberPoly sigma_y;
  FiberPoly half_j;
  FiberPoly residual;
  std::vector<std::pair<int, bool>> degree_ok;  // fiber degree -> residual vanishes
  DiffOp x;
  DeformedGeometry deformation;
};

/// sigma(Y) from the operator logarithm against J/2 from the F-recursion.
SigmaYReport sigma_y_pipeline(const PotentialData& p, int n, int r);

}  // namespace sepvar
