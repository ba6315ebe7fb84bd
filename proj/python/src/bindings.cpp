#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "sepvar/kset.hpp"
#include "sepvar/starprod.hpp"

namespace py = pybind11;
using namespace sepvar;

namespace {

int order_arg(const std::optional<int>& order) { return order ? *order : kExact; }

JetSeries jet_from_terms(int dim, const std::string& terms, std::optional<int> order) {
  return cli::jet_from_json(cli::Json::parse(terms), dim, order_arg(order), "terms");
}

std::string dump(const cli::Json& j) { return j.dump(); }

Side side_arg(const std::string& s) { return parse_side(s); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact computations for formal symplectic groupoids and star products with separation of variables";

  static py::exception<Error> error(m, "SepvarError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error;
      py::object inst = exc(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(exc.ptr(), inst.ptr());
    }
  });

  py::class_<JetSeries>(m, "Jet")
      .def_static("from_terms", &jet_from_terms, py::arg("dim"), py::arg("terms"), py::arg("order") = py::none(),
                  "Jet from a JSON term list [{\"z\": [...], \"zbar\": [...], \"re\": \"p/q\", \"im\": \"p/q\"}]")
      .def_static("z", [](int dim, int k) { return JetSeries::z(dim, k); })
      .def_static("zbar", [](int dim, int l) { return JetSeries::zbar(dim, l); })
      .def_static("constant", [](int dim, long c) { return JetSeries::constant(dim, kExact, Scalar(c)); })
      .def_property_readonly("dim", &JetSeries::dim)
      .def_property_readonly("order", [](const JetSeries& j) -> std::optional<int> {
        return j.is_exact() ? std::nullopt : std::optional<int>(j.order());
      })
      .def("is_zero", &JetSeries::is_zero)
      .def("equals", &JetSeries::equals)
      .def("truncated", &JetSeries::truncated)
      .def("to_json", [](const JetSeries& j) { return dump(cli::to_json(j)); })
      .def("__add__", [](const JetSeries& a, const JetSeries& b) { return a + b; })
      .def("__sub__", [](const JetSeries& a, const JetSeries& b) { return a - b; })
      .def("__mul__", [](const JetSeries& a, const JetSeries& b) { return a * b; })
      .def("__eq__", [](const JetSeries& a, const JetSeries& b) { return a.equals(b); })
      .def("__str__", &JetSeries::to_string)
      .def("__repr__", [](const JetSeries& j) { return "Jet(" + j.to_string() + ")"; });

  py::class_<FiberPoly>(m, "FiberPoly")
      .def_property_readonly("dim", &FiberPoly::dim)
      .def_property_readonly("fiber_order", &FiberPoly::fiber_order)
      .def_property_readonly("jet_order", &FiberPoly::jet_order)
      .def("is_zero", &FiberPoly::is_zero)
      .def("homogeneous", &FiberPoly::homogeneous)
      .def("truncated_fiber", &FiberPoly::truncated_fiber)
      .def("equals", &FiberPoly::equals)
      .def("to_json", [](const FiberPoly& p) { return dump(cli::to_json(p)); })
      .def("__add__", [](const FiberPoly& a, const FiberPoly& b) { return a + b; })
      .def("__sub__", [](const FiberPoly& a, const FiberPoly& b) { return a - b; })
      .def("__eq__", [](const FiberPoly& a, const FiberPoly& b) { return a.equals(b); })
      .def("__str__", &FiberPoly::to_string);

  py::class_<DiffOp>(m, "DiffOp")
      .def_property_readonly("dim", &DiffOp::dim)
      .def_property_readonly("nu_order", &DiffOp::nu_order)
      .def("grade_order", &DiffOp::grade_order, "highest derivative order in grade r (-1 if zero)")
      .def("apply", &DiffOp::apply)
      .def("equals", &DiffOp::equals)
      .def("to_json", [](const DiffOp& a) { return dump(cli::to_json(a)); })
      .def("__eq__", [](const DiffOp& a, const DiffOp& b) { return a.equals(b); })
      .def("__str__", &DiffOp::to_string);

  py::class_<Geometry>(m, "Geometry")
      .def_property_readonly("dim", &Geometry::dim)
      .def_property_readonly("jet_order", &Geometry::jet_order)
      .def("g", &Geometry::g, py::arg("l"), py::arg("k"));
  py::class_<DeformedGeometry>(m, "DeformedGeometry")
      .def_property_readonly("base", &DeformedGeometry::base)
      .def("h", &DeformedGeometry::h, py::arg("l"), py::arg("k"));
  py::class_<PotentialData>(m, "PotentialData")
      .def(py::init([](const JetSeries& phi_minus1, std::vector<JetSeries> higher) {
             return PotentialData{phi_minus1, std::move(higher)};
           }),
           py::arg("phi_minus1"), py::arg("higher") = std::vector<JetSeries>{})
      .def_readonly("phi_minus1", &PotentialData::phi_minus1)
      .def_readonly("higher", &PotentialData::higher)
      .def("phi", &PotentialData::phi);
  py::class_<Preset>(m, "Preset")
      .def_readonly("name", &Preset::name)
      .def_readonly("potential", &Preset::potential)
      .def_readonly("geometry", &Preset::geometry);

  m.def("preset", &preset_geometry, py::arg("name"), py::arg("jet_order"), py::arg("nu_order") = 0,
        py::arg("dim") = 1);
  m.def("metric_from_potential", &metric_from_potential);
  m.def("h_from_psi", &h_from_psi, py::arg("g"), py::arg("psi"));

  m.def("source_target_exp", [](const Geometry& g, const JetSeries& f, const std::string& side, int n) {
    return source_target_exp(g, f, side_arg(side), n);
  });
  m.def("s1_via_potential", [](const Geometry& g, const JetSeries& psi, const JetSeries& f, const std::string& side,
                               int n) { return s1_via_potential(g, psi, f, side_arg(side), n); });

  py::class_<KElement>(m, "KElement")
      .def_readonly("fiber_order", &KElement::fiber_order)
      .def_readonly("value", &KElement::value);
  py::class_<FElement>(m, "FElement")
      .def_readonly("fiber_order", &FElement::fiber_order)
      .def_property_readonly("k", &FElement::k)
      .def_property_readonly("j", &FElement::j);
  m.def("solve_k", &solve_K, py::arg("g"), py::arg("fiber_order"));
  m.def("solve_f", &solve_F, py::arg("d"), py::arg("fiber_order"));
  m.def(
      "membership_passes",
      [](const FiberPoly& k, int test_degree) { return membership_report(k, test_degree).pass; }, py::arg("k"),
      py::arg("test_degree"));
  m.def("st_apply", [](const FiberPoly& k, const JetSeries& f, const std::string& side) {
    return st_apply(k, f, side_arg(side));
  });

  py::class_<StarProduct>(m, "StarProduct")
      .def(py::init<PotentialData, int>(), py::arg("potential"), py::arg("nu_order"))
      .def_property_readonly("dim", &StarProduct::dim)
      .def_property_readonly("nu_order", &StarProduct::nu_order)
      .def_property_readonly("geometry", &StarProduct::geometry)
      .def(
          "mult_op",
          [](const StarProduct& sp, const JetSeries& f, const std::string& side) {
            return sp.mult_op(f, parse_op_side(side));
          },
          py::arg("f"), py::arg("side") = "left")
      .def("multiply", [](const StarProduct& sp, const JetSeries& f, const JetSeries& g) {
        return star_multiply(sp, f, g);
      });
  m.def("sigma_symbol", &sigma_symbol);
  m.def("berezin", &berezin);
  m.def("operator_log", &operator_log);
  m.def("parity_hat", [](const DiffOp& x) {
    ParityResult r = parity_hat(x);
    return py::make_tuple(r.x_hat, r.y);
  });
  m.def("h_from_x3", &h_from_x3);
  m.def("pair_s1", [](const StarProduct& sp, const StarProduct& sp_tilde, const JetSeries& f, const std::string& side) {
    return pair_s1(sp, sp_tilde, f, side_arg(side));
  });
  m.def("dual_berezin_passes", [](const StarProduct& sp, int samples, std::uint64_t seed) {
    return dual_berezin_check(sp, samples, seed).pass;
  }, py::arg("sp"), py::arg("samples") = 3, py::arg("seed") = 1);

  py::class_<SigmaYReport>(m, "SigmaYReport")
      .def_readonly("passed", &SigmaYReport::pass)
      .def_readonly("fiber_order", &SigmaYReport::fiber_order)
      .def_readonly("sigma_y", &SigmaYReport::sigma_y)
      .def_readonly("half_j", &SigmaYReport::half_j)
      .def_readonly("residual", &SigmaYReport::residual)
      .def_readonly("degree_ok", &SigmaYReport::degree_ok)
      .def_readonly("x", &SigmaYReport::x)
      .def_readonly("deformation", &SigmaYReport::deformation);
  m.def("sigma_y_pipeline", &sigma_y_pipeline, py::arg("potential"), py::arg("fiber_order"), py::arg("nu_order"));

  m.def(
      "run",
      [](const cli::Options& o) {
        cli::Result r = cli::run_command(o);
        return py::make_tuple(r.pass, r.document.dump());
      },
      "Runs a command-line verb; returns (pass, result document as JSON text)");
  py::class_<cli::Options>(m, "Options")
      .def(py::init<>())
      .def_readwrite("verb", &cli::Options::verb)
      .def_readwrite("suites", &cli::Options::suites)
      .def_readwrite("geometry", &cli::Options::geometry)
      .def_readwrite("fiber_order", &cli::Options::fiber_order)
      .def_readwrite("nu_order", &cli::Options::nu_order)
      .def_readwrite("jet_order", &cli::Options::jet_order)
      .def_readwrite("psi", &cli::Options::psi)
      .def_readwrite("side", &cli::Options::side)
      .def_readwrite("test_degree", &cli::Options::test_degree)
      .def_readwrite("seed", &cli::Options::seed)
      .def_readwrite("skip_jacobi", &cli::Options::skip_jacobi)
      .def_readwrite("function", &cli::Options::function)
      .def_readwrite("with_", &cli::Options::with);
}
