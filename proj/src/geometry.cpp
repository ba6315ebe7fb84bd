#include "sepvar/geometry.hpp"

namespace sepvar {

namespace {

void check_square(const JetMatrix<Scalar>& m, const char* what) {
  const std::size_t n = m.size();
  if (n == 0 || n > kMaxDim) throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": dimension must be in 1..4");
  for (const auto& row : m) {
    if (row.size() != n) throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": matrix is not square");
    for (const auto& e : row)
      if (e.dim() != static_cast<int>(n))
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": entry dimension differs from matrix size");
  }
}

std::string describe(const JacobiResidual& r) {
  std::string s = r.identity + " identity at (";
  for (std::size_t i = 0; i < r.indices.size(); ++i) s += (i ? "," : "") + std::to_string(r.indices[i] + 1);
  return s + "): residual " + r.value;
}

}  // namespace

JetMatrix<Dual> make_dual(const JetMatrix<Scalar>& body, const JetMatrix<Scalar>& soul) {
  JetMatrix<Dual> out;
  for (std::size_t l = 0; l < body.size(); ++l) {
    out.emplace_back();
    for (std::size_t k = 0; k < body.size(); ++k) out.back().push_back(sepvar::make_dual(body[l][k], soul[l][k]));
  }
  return out;
}

Geometry::Geometry(JetMatrix<Scalar> g_upper, bool check_jacobi) : g_(std::move(g_upper)) {
  check_square(g_, "Geometry");
  if (check_jacobi) {
    auto rep = jacobi_check(g_);
    if (!rep.pass) throw Error(ErrorCode::JacobiViolation, describe(rep.failures.front()));
  }
}

DeformedGeometry::DeformedGeometry(Geometry base, JetMatrix<Scalar> h_upper, bool check_jacobi)
    : base_(std::move(base)), h_(std::move(h_upper)) {
  check_square(h_, "DeformedGeometry");
  if (static_cast<int>(h_.size()) != base_.dim())
    throw Error(ErrorCode::DimensionMismatch, "h and g have different dimensions");
  if (check_jacobi) {
    auto rep = jacobi_deformed_check(base_.g_upper(), h_);
    if (!rep.pass) throw Error(ErrorCode::JacobiViolation, "deformation: " + describe(rep.failures.front()));
  }
  combined_ = make_dual(base_.g_upper(), h_);
}

JetSeries PotentialData::phi(int r) const {
  if (r == -1) return phi_minus1;
  if (r >= 0 && r < static_cast<int>(higher.size())) return higher[r];
  return JetSeries(dim(), kExact);
}

JacobiReport jacobi_check(const Geometry& g) { return jacobi_residuals(g.g_upper()); }
JacobiReport jacobi_check(const JetMatrix<Scalar>& g) { return jacobi_residuals(g); }

JacobiReport jacobi_deformed_check(const DeformedGeometry& d) {
  return jacobi_deformed_check(d.base().g_upper(), d.h_upper());
}

JacobiReport jacobi_deformed_check(const JetMatrix<Scalar>& g, const JetMatrix<Scalar>& h) {
  JacobiReport rep;
  const int n = static_cast<int>(g.size());
  const int dim = g[0][0].dim();
  rep.jet_order = lower_order(std::min(matrix_jet_order(g), matrix_jet_order(h)));
  auto record = [&](const char* name, std::vector<int> idx, const JetSeries& r) {
    ++rep.checked;
    if (!r.is_zero()) {
      rep.pass = false;
      rep.failures.push_back({name, std::move(idx), r.to_string()});
    }
  };
  for (int l = 0; l < n; ++l)
    for (int q = 0; q < n; ++q)
      for (int p = 0; p < n; ++p) {
        JetSeries r(dim, kExact);
        for (int k = 0; k < n; ++k) {
          r += g[l][k] * h[q][p].d_holo(k) + h[l][k] * g[q][p].d_holo(k);
          r -= g[q][k] * h[l][p].d_holo(k) + h[q][k] * g[l][p].d_holo(k);
        }
        record("holomorphic", {l, q, p}, r);
      }
  for (int q = 0; q < n; ++q)
    for (int p = 0; p < n; ++p)
      for (int k = 0; k < n; ++k) {
        JetSeries r(dim, kExact);
        for (int l = 0; l < n; ++l) {
          r += g[l][k] * h[q][p].d_anti(l) + h[l][k] * g[q][p].d_anti(l);
          r -= g[l][p] * h[q][k].d_anti(l) + h[l][p] * g[q][k].d_anti(l);
        }
        record("antiholomorphic", {q, p, k}, r);
      }
  return rep;
}

JacobiReport jacobi_deformed_check_dual(const JetMatrix<Scalar>& g, const JetMatrix<Scalar>& h) {
  JetMatrix<Dual> m = make_dual(g, h);
  // The soul of the Jacobi identity for g + eps h is the linearized identity.
  JacobiReport rep;
  const int n = static_cast<int>(g.size());
  rep.checked = 2 * n * n * n;
  rep.jet_order = lower_order(matrix_jet_order(m));
  auto soul_of = [&](const char* name, int a, int b, int c) {
    const int dim = g[0][0].dim();
    Jet<Dual> r(dim, kExact);
    for (int x = 0; x < n; ++x) {
      if (std::string(name) == "holomorphic") {
        r += m[a][x] * m[b][c].d_holo(x);
        r -= m[b][x] * m[a][c].d_holo(x);
      } else {
        r += m[x][c] * m[a][b].d_anti(x);
        r -= m[x][b] * m[a][c].d_anti(x);
      }
    }
    return soul(r);
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (const char* name : {"holomorphic", "antiholomorphic"}) {
          JetSeries s = soul_of(name, a, b, c);
          if (!s.is_zero()) {
            rep.pass = false;
            rep.failures.push_back({name, {a, b, c}, s.to_string()});
          }
        }
  return rep;
}

JetMatrix<Scalar> mixed_hessian(const JetSeries& phi) {
  const int n = phi.dim();
  JetMatrix<Scalar> h(n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) h[k].push_back(phi.d_holo(k).d_anti(l));
  return h;
}

JetMatrix<Scalar> jet_matrix_inverse(const JetMatrix<Scalar>& m) {
  const int n = static_cast<int>(m.size());
  const int dim = m[0][0].dim();
  JetMatrix<Scalar> a = m;
  JetMatrix<Scalar> inv(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      inv[i].push_back(JetSeries::constant(dim, kExact, Scalar(i == j ? 1 : 0)));
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r)
      if (!a[r][col].constant_term().is_zero()) {
        pivot = r;
        break;
      }
    if (pivot < 0) throw Error(ErrorCode::DegenerateHessian, "matrix is singular at the base point");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    JetSeries p = a[col][col].reciprocal();
    for (int j = 0; j < n; ++j) {
      a[col][j] = a[col][j] * p;
      inv[col][j] = inv[col][j] * p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      JetSeries f = a[r][col];
      for (int j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

Geometry metric_from_potential(const PotentialData& p) {
  JetMatrix<Scalar> hess = mixed_hessian(p.phi_minus1);
  JetMatrix<Scalar> inv;
  try {
    inv = jet_matrix_inverse(hess);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateHessian || e.code() == ErrorCode::NonUnitLeading)
      throw Error(ErrorCode::DegenerateHessian, "potential Hessian is degenerate at the base point");
    throw;
  }
  // inv[l][k] solves sum_k H[k][l'] inv[l][k] = delta; it is g^{lk} directly.
  return Geometry(std::move(inv), true);
}

DeformedGeometry h_from_psi(const Geometry& g, const JetSeries& psi) {
  const int n = g.dim();
  if (psi.dim() != n) throw Error(ErrorCode::DimensionMismatch, "psi has a different chart dimension");
  JetMatrix<Scalar> hess = mixed_hessian(psi);  // hess[p][q]
  JetMatrix<Scalar> h(n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      JetSeries acc(psi.dim(), kExact);
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) acc -= g.g(l, p) * hess[p][q] * g.g(q, k);
      h[l].push_back(std::move(acc));
    }
  return DeformedGeometry(g, std::move(h), false);
}

JetSeries disc_potential(int order) {
  JetSeries phi(1, order);
  for (int k = 1; 2 * k <= order; ++k) phi.add(MultiIndex::from({k}, {k}), Scalar::rational(1, k));
  return phi;
}

JetSeries fubini_study_potential(int order) {
  JetSeries phi(1, order);
  for (int k = 1; 2 * k <= order; ++k)
    phi.add(MultiIndex::from({k}, {k}), Scalar::rational(k % 2 == 1 ? 1 : -1, k));
  return phi;
}

Preset preset_geometry(const std::string& name, int jet_order, int nu_order, int dim) {
  Preset p;
  p.name = name;
  if (name == "flat") {
    JetSeries phi(dim, kExact);
    for (int k = 0; k < dim; ++k) phi.add(MultiIndex::unit_holo(k) + MultiIndex::unit_anti(k), Scalar(1));
    p.potential.phi_minus1 = phi;
  } else if (name == "disc" || name == "fubini-study") {
    if (dim != 1) throw Error(ErrorCode::UnknownPreset, "preset " + name + " is one-dimensional");
    p.potential.phi_minus1 = name == "disc" ? disc_potential(jet_order + 2) : fubini_study_potential(jet_order + 2);
  } else {
    throw Error(ErrorCode::UnknownPreset, "unknown preset \"" + name + "\" (expected flat, disc or fubini-study)");
  }
  for (int r = 0; r <= nu_order; ++r) p.potential.higher.emplace_back(dim, kExact);
  p.geometry = metric_from_potential(p.potential);
  return p;
}

}  // namespace sepvar
