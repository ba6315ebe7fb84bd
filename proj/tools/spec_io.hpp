#pragma once

#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "sepvar/diffop.hpp"
#include "sepvar/geometry.hpp"

namespace sepvar::cli {

using Json = nlohmann::ordered_json;

Json to_json(const Scalar& s);
Json to_json(const JetSeries& j);
Json to_json(const FiberPoly& p);
Json to_json(const DiffOp& a);
Json to_json(const JetMatrix<Scalar>& m);

Scalar scalar_from_json(const Json& j, const std::string& where);
/// Term list [{"z": [...], "zbar": [...], "re": "p/q", "im": "p/q"}] at the given order.
JetSeries jet_from_json(const Json& j, int dim, int order, const std::string& where);
JetMatrix<Scalar> matrix_from_json(const Json& j, int dim, int order, const std::string& where);
/// Inverse of to_json(FiberPoly).
FiberPoly fiber_from_json(const Json& j, int dim, const std::string& where);

/// Input geometry: a preset reference or explicit terms.
struct GeometrySpec {
  std::string name;  // preset name or file path
  std::string preset;
  int dimension = 1;
  int jet_order = 12;
  bool exact = false;  // stored jets are exact polynomials
  std::optional<JetSeries> potential;
  std::optional<JetMatrix<Scalar>> g_upper;
  std::optional<JetSeries> psi;
  std::map<int, JetSeries> higher;  // Phi_r for r >= 0
  std::optional<JetMatrix<Scalar>> h_upper;

  bool operator==(const GeometrySpec& o) const;

  int stored_order() const { return exact ? kExact : jet_order; }
  bool has_potential() const { return potential.has_value(); }
  PotentialData potential_data() const;
  /// Base tensor; Jacobi is checked unless `check_jacobi` is false.
  Geometry geometry(bool check_jacobi = true) const;
  bool has_deformation() const { return h_upper.has_value() || psi.has_value(); }
  /// g + eps h from h_upper, else from psi.
  DeformedGeometry deformation(bool check_jacobi = true) const;
};

/// Preset: flat, disc or fubini-study. The preset psi is the preset's own
/// Kaehler potential.
GeometrySpec preset_spec(const std::string& name, int jet_order);
GeometrySpec parse_geometry_json(const Json& j, const std::string& name);
GeometrySpec parse_geometry_text(const std::string& text, const std::string& name);
/// A preset name or a path to a JSON geometry file.
GeometrySpec parse_geometry(const std::string& ref, int jet_order);
Json render(const GeometrySpec& spec);

}  // namespace sepvar::cli
