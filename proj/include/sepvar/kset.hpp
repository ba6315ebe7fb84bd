#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sepvar/groupoid.hpp"

namespace sepvar {

/// The element K of the set K attached to g, known through fiber degree N.
struct KElement {
  Geometry geometry;
  int fiber_order = 0;
  FiberPoly value;
};

/// F = K + eps J attached to g + eps h.
struct FElement {
  DeformedGeometry geometry;
  int fiber_order = 0;
  DualFiber value;

  FiberPoly k() const { return body(value); }
  FiberPoly j() const { return soul(value); }
};

/// Degree-by-degree solution of {e^{H_K} a, a'} = 0 for coordinate test
/// functions, starting from K_2 = g^{lk} zeta_k zetabar_l.
template <class C>
Fiber<C> solve_element(const JetMatrix<C>& g, int n);

KElement solve_K(const Geometry& g, int n);
FElement solve_F(const DeformedGeometry& d, int n);

struct MembershipRow {
  std::string family;  // "holomorphic" or "antiholomorphic"
  MultiIndex a, b;
  bool pass = true;
  std::string residual;
};

struct MembershipReport {
  bool pass = true;
  int test_degree = 0;
  int fiber_order = 0;  // residuals are exact through this fiber degree
  std::vector<MembershipRow> rows;
  std::vector<MembershipRow> failures() const;
};

/// {e^{H_F} a, a'} and {e^{H_F} b, b'} over all monomials of degree 1..test_degree.
/// Exact inputs are expanded through `fiber_order` (default 2 * test_degree + 2).
template <class C>
MembershipReport membership_report(const Fiber<C>& f, int test_degree, std::optional<int> fiber_order = std::nullopt);

/// S(ab) = a (e^{H_K} b) and T(ab) = (e^{H_K} a) b for holomorphic a and
/// antiholomorphic b. Known through one fiber degree less than F.
template <class C>
Fiber<C> st_from_element(const Fiber<C>& f, const Jet<C>& a, const Jet<C>& b, Side side);

/// The same formulas extended monomial by monomial to an arbitrary jet.
template <class C>
Fiber<C> st_apply(const Fiber<C>& f, const Jet<C>& u, Side side);

SourceTargetMap make_map(const KElement& k, Side side);
SourceTargetMap make_map(const FElement& f, Side side);

/// S_1 f = a {G, S_0 b} with G = sum_m H_K^m J / (m+1)! (and the mirror
/// formula for the target side).
FiberPoly deformation_from_hamiltonian(const KElement& k, const FiberPoly& j, const JetSeries& f, Side side);

}  // namespace sepvar
