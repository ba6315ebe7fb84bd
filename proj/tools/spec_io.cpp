#include "spec_io.hpp"

#include <fstream>
#include <sstream>

namespace sepvar::cli {

namespace {

Json exponents(const MultiIndex& m, bool holo, int dim) {
  return holo ? Json(m.holo_vector(dim)) : Json(m.anti_vector(dim));
}

std::vector<int> read_exponents(const Json& j, const char* key, int dim, const std::string& where) {
  if (!j.contains(key)) return std::vector<int>(dim, 0);
  const Json& v = j.at(key);
  if (!v.is_array() || static_cast<int>(v.size()) > dim)
    throw Error(ErrorCode::ParseError, where + ": \"" + key + "\" must be a list of at most " + std::to_string(dim) +
                                           " exponents");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer() || e.get<int>() < 0)
      throw Error(ErrorCode::ParseError, where + ": exponents must be non-negative integers");
    out.push_back(e.get<int>());
  }
  out.resize(dim, 0);
  return out;
}

Json order_json(int order) { return order >= kExact ? Json(nullptr) : Json(order); }

Json term_list(const JetSeries& j) {
  Json terms = Json::array();
  for (const auto& [m, c] : j.terms()) {
    Json t = {{"z", exponents(m, true, j.dim())}, {"zbar", exponents(m, false, j.dim())}};
    Json s = to_json(c);
    t["re"] = s["re"];
    t["im"] = s["im"];
    terms.push_back(t);
  }
  return terms;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open geometry file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Json to_json(const Scalar& s) { return {{"re", s.re().get_str()}, {"im", s.im().get_str()}}; }

Json to_json(const JetSeries& j) { return {{"order", order_json(j.order())}, {"terms", term_list(j)}}; }

Json to_json(const FiberPoly& p) {
  Json terms = Json::array();
  for (const auto& [k, c] : p.terms())
    terms.push_back({{"zeta", exponents(k, true, p.dim())},
                     {"zetabar", exponents(k, false, p.dim())},
                     {"coeff", term_list(c)}});
  return {{"fiber_order", order_json(p.fiber_order())}, {"jet_order", order_json(p.jet_order())}, {"terms", terms}};
}

Json to_json(const DiffOp& a) {
  Json grades = Json::array();
  for (int r = 0; r <= a.nu_order(); ++r) {
    Json terms = Json::array();
    for (const auto& [idx, c] : a.grade(r).terms())
      terms.push_back({{"dz", exponents(idx, true, a.dim())},
                       {"dzbar", exponents(idx, false, a.dim())},
                       {"coeff", term_list(c)}});
    grades.push_back({{"grade", r}, {"jet_order", order_json(a.grade(r).jet_order())}, {"terms", terms}});
  }
  return {{"nu_order", a.nu_order()}, {"grades", grades}};
}

Json to_json(const JetMatrix<Scalar>& m) {
  Json rows = Json::array();
  for (const auto& row : m) {
    Json r = Json::array();
    for (const auto& e : row) r.push_back(term_list(e));
    rows.push_back(r);
  }
  return rows;
}

Scalar scalar_from_json(const Json& j, const std::string& where) {
  auto part = [&](const char* key) -> std::string {
    if (!j.contains(key)) return "0";
    const Json& v = j.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long>());
    throw Error(ErrorCode::ParseError, where + ": \"" + key + "\" must be a rational string \"p/q\"");
  };
  try {
    return Scalar::parse(part("re"), part("im"));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, where + ": " + e.message());
  }
}

JetSeries jet_from_json(const Json& j, int dim, int order, const std::string& where) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, where + ": expected a list of terms");
  JetSeries out(dim, order);
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string at = where + "[" + std::to_string(i) + "]";
    const Json& t = j[i];
    if (!t.is_object()) throw Error(ErrorCode::ParseError, at + ": expected a term object");
    MultiIndex m = MultiIndex::from(read_exponents(t, "z", dim, at), read_exponents(t, "zbar", dim, at));
    if (m.degree() > order)
      throw Error(ErrorCode::ParseError, at + ": term of degree " + std::to_string(m.degree()) +
                                             " exceeds the declared jet order " + std::to_string(order));
    out.add(m, scalar_from_json(t, at));
  }
  return out;
}

JetMatrix<Scalar> matrix_from_json(const Json& j, int dim, int order, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw Error(ErrorCode::ParseError, where + ": expected a " + std::to_string(dim) + "x" + std::to_string(dim) +
                                           " matrix of term lists");
  JetMatrix<Scalar> m(dim);
  for (int l = 0; l < dim; ++l) {
    if (!j[l].is_array() || static_cast<int>(j[l].size()) != dim)
      throw Error(ErrorCode::ParseError, where + "[" + std::to_string(l) + "]: expected " + std::to_string(dim) +
                                             " entries");
    for (int k = 0; k < dim; ++k)
      m[l].push_back(
          jet_from_json(j[l][k], dim, order, where + "[" + std::to_string(l) + "][" + std::to_string(k) + "]"));
  }
  return m;
}

FiberPoly fiber_from_json(const Json& j, int dim, const std::string& where) {
  auto order = [&](const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return kExact;
    if (!j.at(key).is_number_integer()) throw Error(ErrorCode::ParseError, where + ": \"" + key + "\" must be an integer");
    return j.at(key).get<int>();
  };
  if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array())
    throw Error(ErrorCode::ParseError, where + ": expected a fiber polynomial object");
  const int jet = order("jet_order");
  FiberPoly p(dim, jet, order("fiber_order"));
  const Json& terms = j.at("terms");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    std::string at = where + ".terms[" + std::to_string(i) + "]";
    MultiIndex key = MultiIndex::from(read_exponents(terms[i], "zeta", dim, at), read_exponents(terms[i], "zetabar", dim, at));
    if (!terms[i].contains("coeff")) throw Error(ErrorCode::ParseError, at + ": missing \"coeff\"");
    p.add(key, jet_from_json(terms[i].at("coeff"), dim, jet, at + ".coeff"));
  }
  return p;
}

bool GeometrySpec::operator==(const GeometrySpec& o) const {
  auto same_jet = [](const std::optional<JetSeries>& a, const std::optional<JetSeries>& b) {
    return a.has_value() == b.has_value() && (!a || (a->order() == b->order() && a->terms() == b->terms()));
  };
  auto same_matrix = [](const std::optional<JetMatrix<Scalar>>& a, const std::optional<JetMatrix<Scalar>>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    if (a->size() != b->size()) return false;
    for (std::size_t l = 0; l < a->size(); ++l)
      for (std::size_t k = 0; k < a->size(); ++k)
        if ((*a)[l][k].order() != (*b)[l][k].order() || (*a)[l][k].terms() != (*b)[l][k].terms()) return false;
    return true;
  };
  if (preset != o.preset || dimension != o.dimension || jet_order != o.jet_order || exact != o.exact) return false;
  if (!same_jet(potential, o.potential) || !same_jet(psi, o.psi)) return false;
  if (!same_matrix(g_upper, o.g_upper) || !same_matrix(h_upper, o.h_upper)) return false;
  if (higher.size() != o.higher.size()) return false;
  for (const auto& [r, f] : higher) {
    auto it = o.higher.find(r);
    if (it == o.higher.end() || it->second.order() != f.order() || it->second.terms() != f.terms()) return false;
  }
  return true;
}

PotentialData GeometrySpec::potential_data() const {
  if (!potential)
    throw Error(ErrorCode::UsageError, "geometry '" + name + "' gives g_upper only; this command needs a potential");
  PotentialData p;
  p.phi_minus1 = *potential;
  for (const auto& [r, f] : higher) {
    if (static_cast<int>(p.higher.size()) <= r) p.higher.resize(r + 1, JetSeries(dimension, kExact));
    p.higher[r] = f;
  }
  return p;
}

Geometry GeometrySpec::geometry(bool check_jacobi) const {
  if (g_upper) return Geometry(*g_upper, check_jacobi);
  if (potential) return metric_from_potential(potential_data());
  throw Error(ErrorCode::UsageError, "geometry '" + name + "' has neither a potential nor g_upper");
}

DeformedGeometry GeometrySpec::deformation(bool check_jacobi) const {
  Geometry g = geometry(check_jacobi);
  if (h_upper) return DeformedGeometry(g, *h_upper, check_jacobi);
  if (psi) return h_from_psi(g, *psi);
  throw Error(ErrorCode::UsageError, "geometry '" + name + "' has neither h_upper nor psi; no deformation given");
}

GeometrySpec preset_spec(const std::string& name, int jet_order) {
  Preset p = preset_geometry(name, jet_order);
  GeometrySpec s;
  s.name = name;
  s.preset = name;
  s.dimension = 1;
  s.jet_order = p.potential.phi_minus1.is_exact() ? jet_order : p.potential.phi_minus1.order();
  s.exact = p.potential.phi_minus1.is_exact();
  s.potential = p.potential.phi_minus1;
  s.psi = p.potential.phi_minus1;
  return s;
}

GeometrySpec parse_geometry_json(const Json& j, const std::string& name) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, name + ": top level must be an object");
  if (j.contains("preset") && !j.contains("potential") && !j.contains("g_upper")) {
    const Json& p = j.at("preset");
    if (!p.is_string()) throw Error(ErrorCode::ParseError, name + ": \"preset\" must be a string");
    int order = j.value("jet_order", 12);
    return preset_spec(p.get<std::string>(), order);
  }
  GeometrySpec s;
  s.name = name;
  if (j.contains("preset") && j.at("preset").is_string()) s.preset = j.at("preset").get<std::string>();
  auto integer = [&](const char* key, int lo, int hi) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
      throw Error(ErrorCode::ParseError, name + ": missing integer field \"" + key + "\"");
    int v = j.at(key).get<int>();
    if (v < lo || v > hi)
      throw Error(ErrorCode::ParseError, name + ": \"" + key + "\" must be in " + std::to_string(lo) + ".." +
                                             std::to_string(hi));
    return v;
  };
  s.dimension = integer("dimension", 1, kMaxDim);
  s.jet_order = integer("jet_order", 0, 1000);
  if (j.contains("exact")) {
    if (!j.at("exact").is_boolean()) throw Error(ErrorCode::ParseError, name + ": \"exact\" must be true or false");
    s.exact = j.at("exact").get<bool>();
  }
  const int order = s.stored_order();
  const bool has_p = j.contains("potential"), has_g = j.contains("g_upper");
  if (has_p == has_g) throw Error(ErrorCode::ParseError, name + ": give exactly one of \"potential\" and \"g_upper\"");
  if (has_p) s.potential = jet_from_json(j.at("potential"), s.dimension, order, "potential");
  if (has_g) s.g_upper = matrix_from_json(j.at("g_upper"), s.dimension, order, "g_upper");
  if (j.contains("psi")) s.psi = jet_from_json(j.at("psi"), s.dimension, order, "psi");
  if (j.contains("h_upper")) s.h_upper = matrix_from_json(j.at("h_upper"), s.dimension, order, "h_upper");
  if (j.contains("higher_potential")) {
    const Json& h = j.at("higher_potential");
    if (!h.is_object()) throw Error(ErrorCode::ParseError, name + ": \"higher_potential\" must map nu-grades to terms");
    for (const auto& [key, terms] : h.items()) {
      int r = -1;
      try {
        std::size_t used = 0;
        r = std::stoi(key, &used);
        if (used != key.size()) r = -1;
      } catch (const std::exception&) {
      }
      if (r < 0) throw Error(ErrorCode::ParseError, name + ": higher_potential key '" + key + "' is not a grade >= 0");
      s.higher[r] = jet_from_json(terms, s.dimension, order, "higher_potential." + key);
    }
  }
  return s;
}

GeometrySpec parse_geometry_text(const std::string& text, const std::string& name) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, name + ": " + e.what());
  }
  return parse_geometry_json(j, name);
}

GeometrySpec parse_geometry(const std::string& ref, int jet_order) {
  if (ref == "flat" || ref == "disc" || ref == "fubini-study") return preset_spec(ref, jet_order);
  return parse_geometry_text(read_file(ref), ref);
}

Json render(const GeometrySpec& s) {
  Json j;
  if (!s.preset.empty()) j["preset"] = s.preset;
  j["dimension"] = s.dimension;
  j["jet_order"] = s.jet_order;
  j["exact"] = s.exact;
  if (s.potential) j["potential"] = term_list(*s.potential);
  if (s.g_upper) j["g_upper"] = to_json(*s.g_upper);
  if (s.psi) j["psi"] = term_list(*s.psi);
  if (!s.higher.empty()) {
    Json h = Json::object();
    for (const auto& [r, f] : s.higher) h[std::to_string(r)] = term_list(f);
    j["higher_potential"] = h;
  }
  if (s.h_upper) j["h_upper"] = to_json(*s.h_upper);
  return j;
}

}  // namespace sepvar::cli
