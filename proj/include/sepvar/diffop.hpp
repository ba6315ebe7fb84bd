#pragma once

#include <string>
#include <vector>

#include "sepvar/fiber.hpp"
#include "sepvar/jet_table.hpp"

namespace sepvar {

/// nu-series of jets f_0 + nu f_1 + ... known through grade size()-1.
using NuSeries = std::vector<JetSeries>;

/// Formal differential operator A = A_0 + nu A_1 + ... + nu^R A_R.
///
/// Grade r maps a derivative multi-index (holomorphic slots for d/dz^k,
/// antiholomorphic slots for d/dzbar^l) to its coefficient jet; the
/// coefficient sits to the left of the derivative.
class DiffOp {
 public:
  using Grade = JetTable<Scalar>;

  DiffOp() = default;
  DiffOp(int dim, int nu_order);

  static DiffOp identity(int dim, int nu_order);
  static DiffOp multiplication(const JetSeries& f, int nu_order);
  /// nu^grade * coeff * d^index
  static DiffOp term(int grade, const MultiIndex& index, const JetSeries& coeff, int nu_order);

  int dim() const { return dim_; }
  int nu_order() const { return static_cast<int>(grades_.size()) - 1; }
  const Grade& grade(int r) const { return grades_.at(r); }
  Grade& grade(int r) { return grades_.at(r); }

  void add_term(int r, const MultiIndex& index, const JetSeries& coeff);

  /// Highest total derivative order present in grade r (-1 if zero).
  int grade_order(int r) const;
  /// Lowest grade that is not identically zero (nu_order()+1 if none).
  int min_grade() const;
  /// Minimum coefficient jet order over all grades.
  int jet_order() const;

  NuSeries apply(const JetSeries& f) const;
  JetSeries apply_grade(int r, const JetSeries& f) const;

  DiffOp& operator+=(const DiffOp& o);
  DiffOp& operator-=(const DiffOp& o);
  DiffOp& operator*=(const Scalar& s);
  friend DiffOp operator+(DiffOp a, const DiffOp& b) { return a += b; }
  friend DiffOp operator-(DiffOp a, const DiffOp& b) { return a -= b; }
  friend DiffOp operator*(DiffOp a, const Scalar& s) { return a *= s; }
  friend DiffOp operator*(const Scalar& s, DiffOp a) { return a *= s; }

  /// nu^k * A (known through grade nu_order() + k).
  DiffOp shift_nu(int k) const;
  /// A / nu; requires a vanishing grade 0.
  DiffOp divide_nu() const;
  DiffOp truncated_nu(int nu_order) const;

  /// Equality of all grades up to the common nu order and per-grade jet order.
  bool equals(const DiffOp& o) const;

  std::string to_string() const;

 private:
  int dim_ = 1;
  std::vector<Grade> grades_;
};

/// A o B via the Leibniz rule.
DiffOp op_compose(const DiffOp& a, const DiffOp& b);

/// (1/nu)[A, B]; throws DivisibilityError if the nu^0 grade of [A,B] is nonzero.
DiffOp commutator_over_nu(const DiffOp& a, const DiffOp& b);

/// Result of a naturality inspection.
struct NaturalityReport {
  struct Row {
    int grade;
    int order;  // -1 for the zero operator
    int bound;
    bool ok;
  };
  std::vector<Row> rows;
  bool natural = true;  // ord(A_r) <= r for all r
  bool sharp = true;    // ord(A_{2k}), ord(A_{2k+1}) <= 2k
  bool checked_sharp = false;
  bool pass() const { return natural && (!checked_sharp || sharp); }
};

NaturalityReport naturality_report(const DiffOp& a, bool sharp_bound = false);

/// sigma-symbol: sum over r of the order-r principal part of A_r with
/// d/dz^k -> zeta_k and d/dzbar^l -> zetabar_l. Fiber order = nu_order().
FiberPoly sigma_symbol(const DiffOp& a);

}  // namespace sepvar
