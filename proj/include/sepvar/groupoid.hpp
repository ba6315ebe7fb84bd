#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "sepvar/algebra.hpp"
#include "sepvar/geometry.hpp"

namespace sepvar {

enum class Side { source, target };

std::string to_string(Side s);
Side parse_side(const std::string& s);

/// D = zeta_k g^{lk} d/dzbar^l (source) or Dbar = zetabar_l g^{lk} d/dz^k (target).
template <class C>
VectorField<C> groupoid_field(const JetMatrix<C>& g, Side side);

/// Sf = e^D f, Tf = e^Dbar f, cut at fiber degree N.
FiberPoly source_target_exp(const Geometry& g, const JetSeries& f, Side side, int n);

/// The same exponential for g + eps h over dual numbers.
DualFiber deformed_source_target(const DeformedGeometry& d, const JetSeries& f, Side side, int n);

/// S_1 f = V(S_0 f) with V = sum_m (ad D)^m(E) / (m+1)!.
FiberPoly s1_via_ad_series(const DeformedGeometry& d, const JetSeries& f, Side side, int n);

/// S_1 f = (psi_p - S_0 psi_p) D^p S_0 f with psi_p = d psi / dz^p and
/// D^p = g^{lp} d/dzbar^l; the target side uses the conjugate formula.
FiberPoly s1_via_potential(const Geometry& g, const JetSeries& psi, const JetSeries& f, Side side, int n);

/// A source or target mapping f -> S_0 f + eps S_1 f given as an evaluator.
/// Undeformed maps have zero soul.
struct SourceTargetMap {
  int dim = 1;
  Side side = Side::source;
  int fiber_order = 0;
  bool deformed = false;
  std::function<DualFiber(const JetSeries&)> eval;

  DualFiber operator()(const JetSeries& f) const { return eval(f); }
  /// S(u + eps v) = S(u) + eps S_0(v).
  DualFiber apply(const DualJet& f) const;
};

SourceTargetMap make_map(const Geometry& g, Side side, int n);
SourceTargetMap make_map(const DeformedGeometry& d, Side side, int n);

/// Reads g^{lk} (and h^{lk} for deformed maps) off the first fiber
/// derivatives of the map on the coordinate functions.
std::variant<Geometry, DeformedGeometry> recover_tensors(const SourceTargetMap& map);

/// {f,g}_0 + eps {f,g}_1 with {f,g} = g^{lk}(dbar_l f d_k g - dbar_l g d_k f).
template <class C>
Jet<C> chart_bracket(const JetMatrix<C>& g, const Jet<C>& f, const Jet<C>& h);

struct AxiomRow {
  std::string axiom;
  int sample = 0;
  bool pass = true;
  std::string residual;
};

struct AxiomReport {
  bool pass = true;
  std::vector<AxiomRow> rows;
  std::vector<AxiomRow> failures() const;
};

/// Zero-section, product, bracket and commutation axioms of the deformed
/// groupoid on each sample pair.
AxiomReport verify_axioms(const SourceTargetMap& s, const SourceTargetMap& t, const DeformedGeometry& d,
                          const std::vector<std::pair<JetSeries, JetSeries>>& samples);

}  // namespace sepvar
