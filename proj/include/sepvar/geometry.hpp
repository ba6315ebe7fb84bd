#pragma once

#include <string>
#include <vector>

#include "sepvar/jet.hpp"

namespace sepvar {

/// Square matrix of jets. For Kaehler-Poisson tensors m[l][k] stores g^{lk}
/// with l the antiholomorphic and k the holomorphic index.
template <class C>
using JetMatrix = std::vector<std::vector<Jet<C>>>;

template <class C>
int matrix_jet_order(const JetMatrix<C>& m) {
  int o = kExact;
  for (const auto& row : m)
    for (const auto& e : row) o = std::min(o, e.order());
  return o;
}

JetMatrix<Dual> make_dual(const JetMatrix<Scalar>& body, const JetMatrix<Scalar>& soul);

/// Kaehler-Poisson tensor g^{lk} on a chart around the origin.
class Geometry {
 public:
  Geometry() = default;
  /// Validates the Jacobi identity unless `check_jacobi` is false.
  explicit Geometry(JetMatrix<Scalar> g_upper, bool check_jacobi = true);

  int dim() const { return static_cast<int>(g_.size()); }
  int jet_order() const { return matrix_jet_order(g_); }
  const JetMatrix<Scalar>& g_upper() const { return g_; }
  const JetSeries& g(int l, int k) const { return g_[l][k]; }

 private:
  JetMatrix<Scalar> g_;
};

/// A Kaehler-Poisson tensor with an infinitesimal deformation g + eps h.
class DeformedGeometry {
 public:
  DeformedGeometry() = default;
  DeformedGeometry(Geometry base, JetMatrix<Scalar> h_upper, bool check_jacobi = true);

  int dim() const { return base_.dim(); }
  const Geometry& base() const { return base_; }
  const JetMatrix<Scalar>& h_upper() const { return h_; }
  const JetSeries& h(int l, int k) const { return h_[l][k]; }
  /// g + eps h as a matrix over dual numbers.
  const JetMatrix<Dual>& combined() const { return combined_; }

 private:
  Geometry base_;
  JetMatrix<Scalar> h_;
  JetMatrix<Dual> combined_;
};

/// Potential Phi = (1/nu) Phi_{-1} + Phi_0 + nu Phi_1 + ...
struct PotentialData {
  JetSeries phi_minus1;
  std::vector<JetSeries> higher;  // Phi_0, Phi_1, ...

  int dim() const { return phi_minus1.dim(); }
  /// Phi_r for r >= -1; zero beyond the stored terms.
  JetSeries phi(int r) const;
};

struct JacobiResidual {
  std::string identity;       // "holomorphic" or "antiholomorphic"
  std::vector<int> indices;   // (l, q, p) or (q, p, k), zero-based
  std::string value;
};

struct JacobiReport {
  bool pass = true;
  int checked = 0;
  int jet_order = kExact;
  std::vector<JacobiResidual> failures;
};

/// Residuals of both Jacobi identities for g^{lk}:
///   g^{lk} d_k g^{qp} = g^{qk} d_k g^{lp}  and  g^{lk} dbar_l g^{qp} = g^{lp} dbar_l g^{qk}.
template <class C>
JacobiReport jacobi_residuals(const JetMatrix<C>& g) {
  JacobiReport rep;
  const int n = static_cast<int>(g.size());
  rep.jet_order = lower_order(matrix_jet_order(g));
  auto record = [&](const char* name, std::vector<int> idx, const Jet<C>& r) {
    ++rep.checked;
    if (!r.is_zero()) {
      rep.pass = false;
      rep.failures.push_back({name, std::move(idx), r.to_string()});
    }
  };
  for (int l = 0; l < n; ++l)
    for (int q = 0; q < n; ++q)
      for (int p = 0; p < n; ++p) {
        Jet<C> r(g[0][0].dim(), kExact);
        for (int k = 0; k < n; ++k) {
          r += g[l][k] * g[q][p].d_holo(k);
          r -= g[q][k] * g[l][p].d_holo(k);
        }
        record("holomorphic", {l, q, p}, r);
      }
  for (int q = 0; q < n; ++q)
    for (int p = 0; p < n; ++p)
      for (int k = 0; k < n; ++k) {
        Jet<C> r(g[0][0].dim(), kExact);
        for (int l = 0; l < n; ++l) {
          r += g[l][k] * g[q][p].d_anti(l);
          r -= g[l][p] * g[q][k].d_anti(l);
        }
        record("antiholomorphic", {q, p, k}, r);
      }
  return rep;
}

JacobiReport jacobi_check(const Geometry& g);
JacobiReport jacobi_check(const JetMatrix<Scalar>& g);

/// Linearized Jacobi identities for (g, h), evaluated directly.
JacobiReport jacobi_deformed_check(const DeformedGeometry& d);
JacobiReport jacobi_deformed_check(const JetMatrix<Scalar>& g, const JetMatrix<Scalar>& h);
/// Same predicate as the soul of the Jacobi identity for g + eps h over dual numbers.
JacobiReport jacobi_deformed_check_dual(const JetMatrix<Scalar>& g, const JetMatrix<Scalar>& h);

/// Mixed Hessian H[k][l] = d^2 phi / dz^k dzbar^l.
JetMatrix<Scalar> mixed_hessian(const JetSeries& phi);

/// Inverse of a jet matrix whose constant part is invertible.
JetMatrix<Scalar> jet_matrix_inverse(const JetMatrix<Scalar>& m);

/// g^{lk} as the jet inverse of the potential Hessian.
Geometry metric_from_potential(const PotentialData& p);

/// h^{lk} = - g^{lp} (d^2 psi / dz^p dzbar^q) g^{qk}
DeformedGeometry h_from_psi(const Geometry& g, const JetSeries& psi);

struct Preset {
  std::string name;
  PotentialData potential;
  Geometry geometry;
};

/// flat (any dim), disc and fubini-study (dim 1). Curved potentials are
/// expanded to order jet_order + 2 so that g^{lk} is exact through
/// jet_order; the flat preset is an exact polynomial.
Preset preset_geometry(const std::string& name, int jet_order, int nu_order = 0, int dim = 1);

/// -log(1 - z zbar) and log(1 + z zbar) as jets (dim 1).
JetSeries disc_potential(int order);
JetSeries fubini_study_potential(int order);

}  // namespace sepvar
