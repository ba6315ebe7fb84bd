#include "cli.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>
#include <sstream>

#include "sepvar/kset.hpp"
#include "sepvar/samples.hpp"
#include "sepvar/starprod.hpp"

namespace sepvar::cli {

const std::vector<std::string>& verbs() {
  static const std::vector<std::string> v = {"solve-k", "solve-f", "source", "target", "star",
                                             "berezin", "log-x",   "sigma-y", "verify"};
  return v;
}

const std::vector<std::string>& suites() {
  static const std::vector<std::string> v = {"axioms", "kset", "starprod", "pipeline"};
  return v;
}

namespace {

constexpr int kMaxExtra = 64;

/// Geometry source. Presets are re-expanded with extra jet order when a
/// computation runs out of budget; file geometries are used as given.
class Context {
 public:
  explicit Context(const Options& opt) : opt_(opt), base_(parse_geometry(opt.geometry, opt.jet_order)) {
    if (opt.psi) {
      std::ifstream in(*opt.psi);
      if (!in) throw Error(ErrorCode::ParseError, "cannot open psi file '" + *opt.psi + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      Json j;
      try {
        j = Json::parse(ss.str());
      } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::ParseError, *opt.psi + ": " + e.what());
      }
      const Json& terms = j.is_object() && j.contains("psi") ? j.at("psi") : j;
      int order = j.is_object() && j.contains("jet_order") && j.at("jet_order").is_number_integer()
                      ? j.at("jet_order").get<int>()
                      : kExact;
      if (j.is_object() && j.value("exact", false)) order = kExact;
      psi_ = jet_from_json(terms, base_.dimension, order, *opt.psi);
      base_.psi = psi_;
    }
    input_order_ = base_.jet_order;
  }

  const Options& opt() const { return opt_; }
  const GeometrySpec& base() const { return base_; }
  bool adjustable() const { return !base_.preset.empty() && base_.name == base_.preset; }
  int input_order() const { return input_order_; }

  GeometrySpec spec(int extra) const {
    if (!adjustable() || extra == 0) return base_;
    GeometrySpec s = preset_spec(base_.preset, opt_.jet_order + extra);
    if (psi_) s.psi = psi_;
    return s;
  }

  /// Runs `run` on growing preset expansions until it succeeds and
  /// `achieved(result) >= target`.
  template <class F, class G>
  auto with_headroom(int target, F run, G achieved) {
    for (int extra = 0;; extra += 4) {
      GeometrySpec s = spec(extra);
      try {
        auto r = run(s);
        if (!adjustable() || achieved(r) >= target || extra >= kMaxExtra) {
          input_order_ = std::max(input_order_, s.jet_order);
          return r;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TruncationInsufficient || !adjustable() || extra >= kMaxExtra) throw;
      }
    }
  }
  template <class F>
  auto with_headroom(F run) {
    return with_headroom(0, run, [](const auto&) { return kExact; });
  }

 private:
  const Options& opt_;
  GeometrySpec base_;
  std::optional<JetSeries> psi_;
  int input_order_ = 0;
};

JetSeries parse_function(const std::string& text, int dim, const std::string& what) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, what + ": " + e.what());
  }
  return jet_from_json(j, dim, kExact, what);
}

std::vector<JetSeries> coordinate_functions(int dim) {
  std::vector<JetSeries> out;
  for (int k = 0; k < dim; ++k) out.push_back(JetSeries::z(dim, k));
  for (int l = 0; l < dim; ++l) out.push_back(JetSeries::zbar(dim, l));
  return out;
}

std::vector<JetSeries> monomials(int dim, int max_degree) {
  std::vector<JetSeries> out;
  for (const auto& m : enumerate_total(dim, max_degree, max_degree, max_degree))
    out.push_back(JetSeries::monomial(dim, kExact, m));
  return out;
}

Json nu_series_json(const NuSeries& s) {
  Json out = Json::array();
  for (std::size_t r = 0; r < s.size(); ++r) out.push_back({{"grade", r}, {"value", to_json(s[r])}});
  return out;
}

std::string nu_series_text(const NuSeries& s) {
  std::string out;
  for (std::size_t r = 0; r < s.size(); ++r) out += "  nu^" + std::to_string(r) + ": " + s[r].to_string() + "\n";
  return out;
}

int series_jet_order(const NuSeries& s) {
  int o = kExact;
  for (const auto& f : s) o = std::min(o, f.order());
  return o;
}

// ---------------------------------------------------------------- verify

struct Check {
  std::string suite;
  std::string name;
  bool pass;
  std::string detail;
};

class Recorder {
 public:
  Recorder(Context& ctx, std::string suite) : ctx_(ctx), suite_(std::move(suite)) {}

  void add(const std::string& name, bool pass, const std::string& detail = "") {
    rows_.push_back({suite_, name, pass, detail});
  }
  /// Runs one check with preset headroom; module errors become failed rows.
  void check(const std::string& name, const std::function<std::pair<bool, std::string>(const GeometrySpec&)>& f) {
    try {
      auto [pass, detail] = ctx_.with_headroom(f);
      add(name, pass, detail);
    } catch (const Error& e) {
      add(name, false, e.what());
    }
  }
  std::vector<Check>& rows() { return rows_; }

 private:
  Context& ctx_;
  std::string suite_;
  std::vector<Check> rows_;
};

std::pair<bool, std::string> verdict(bool pass, const std::string& detail = "") { return {pass, detail}; }

std::string axiom_detail(const AxiomReport& rep) {
  std::string d = std::to_string(rep.rows.size()) + " rows";
  auto f = rep.failures();
  if (!f.empty())
    d += "; " + f.front().axiom + " on sample " + std::to_string(f.front().sample) + ": " + f.front().residual;
  return d;
}

std::vector<std::pair<JetSeries, JetSeries>> sample_pairs(int dim, std::uint64_t seed, int count) {
  SampleGenerator gen(seed);
  std::vector<std::pair<JetSeries, JetSeries>> out;
  for (int i = 0; i < count; ++i) {
    JetSeries a = gen.polynomial(dim, 2, kExact, 3);
    JetSeries b = gen.polynomial(dim, 2, kExact, 3);
    out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

void suite_axioms(Context& ctx, std::vector<Check>& out) {
  const Options& o = ctx.opt();
  Recorder rec(ctx, "axioms");
  const int n = o.fiber_order;
  const int dim = ctx.base().dimension;
  auto samples = sample_pairs(dim, o.seed, dim == 1 ? 20 : 4);
  rec.check("exponential maps satisfy the groupoid axioms", [&](const GeometrySpec& s) {
    DeformedGeometry d = s.deformation(!o.skip_jacobi);
    AxiomReport rep = verify_axioms(make_map(d, Side::source, n), make_map(d, Side::target, n), d, samples);
    return verdict(rep.pass, axiom_detail(rep));
  });
  rec.check("K-set maps satisfy the groupoid axioms", [&](const GeometrySpec& s) {
    FElement f = solve_F(s.deformation(!o.skip_jacobi), n + 1);
    AxiomReport rep = verify_axioms(make_map(f, Side::source), make_map(f, Side::target), f.geometry, samples);
    return verdict(rep.pass, axiom_detail(rep));
  });
  for (auto& r : rec.rows()) out.push_back(r);
}

bool zeta_support(const FiberPoly& k) {
  for (const auto& [m, c] : k.terms())
    if (m.holo_degree() == 0 || m.anti_degree() == 0) return false;
  return true;
}

bool odd_vanish(const FiberPoly& k) {
  for (const auto& [m, c] : k.terms())
    if (m.degree() % 2 == 1) return false;
  return true;
}

FiberPoly quadratic(const JetMatrix<Scalar>& m) {
  const int n = static_cast<int>(m.size());
  FiberPoly out(n, kExact, kExact);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) out += m[l][k] * (FiberPoly::zeta(n, k) * FiberPoly::zetabar(n, l));
  return out;
}

void suite_kset(Context& ctx, std::vector<Check>& out) {
  const Options& o = ctx.opt();
  Recorder rec(ctx, "kset");
  const int n = o.fiber_order;
  const int dim = ctx.base().dimension;
  // membership residuals are exact two degrees below the element's order
  const int member_order = ctx.adjustable() ? std::max(n, 6) : n;
  rec.check("K: odd components vanish", [&](const GeometrySpec& s) {
    return verdict(odd_vanish(solve_K(s.geometry(!o.skip_jacobi), n).value));
  });
  rec.check("K: every monomial has zeta and zetabar factors", [&](const GeometrySpec& s) {
    return verdict(zeta_support(solve_K(s.geometry(!o.skip_jacobi), n).value));
  });
  rec.check("K_2 = g^{lk} zeta_k zetabar_l", [&](const GeometrySpec& s) {
    Geometry g = s.geometry(!o.skip_jacobi);
    return verdict(solve_K(g, n).value.homogeneous(2).equals(quadratic(g.g_upper())));
  });
  rec.check("K: membership up to test degree " + std::to_string(o.test_degree), [&](const GeometrySpec& s) {
    KElement k = solve_K(s.geometry(!o.skip_jacobi), member_order);
    MembershipReport rep = membership_report(k.value, o.test_degree);
    std::string detail = "exact through fiber degree " + std::to_string(rep.fiber_order);
    if (!rep.pass) detail += "; " + rep.failures().front().residual;
    return verdict(rep.pass, detail);
  });
  for (Side side : {Side::source, Side::target}) {
    rec.check("K: " + to_string(side) + " map equals the exponential construction", [&](const GeometrySpec& s) {
      Geometry g = s.geometry(!o.skip_jacobi);
      KElement k = solve_K(g, n);
      for (const auto& f : monomials(dim, dim == 1 ? 4 : 2))
        if (!st_apply(k.value, f, side).equals(source_target_exp(g, f, side, n - 1)))
          return verdict(false, "differs on " + f.to_string());
      return verdict(true);
    });
  }
  if (!ctx.base().has_deformation()) {
    rec.add("deformation checks", true, "skipped: no psi or h_upper given");
    for (auto& r : rec.rows()) out.push_back(r);
    return;
  }
  rec.check("F: J_2 = h^{lk} zeta_k zetabar_l, J even with zeta and zetabar factors", [&](const GeometrySpec& s) {
    DeformedGeometry d = s.deformation(!o.skip_jacobi);
    FElement f = solve_F(d, n);
    FiberPoly j = f.j();
    return verdict(j.homogeneous(2).equals(quadratic(d.h_upper())) && odd_vanish(j) && zeta_support(j));
  });
  rec.check("F: membership up to test degree " + std::to_string(o.test_degree), [&](const GeometrySpec& s) {
    FElement f = solve_F(s.deformation(!o.skip_jacobi), member_order);
    MembershipReport rep = membership_report(f.value, o.test_degree);
    std::string detail = "exact through fiber degree " + std::to_string(rep.fiber_order);
    if (!rep.pass) detail += "; " + rep.failures().front().residual;
    return verdict(rep.pass, detail);
  });
  for (Side side : {Side::source, Side::target}) {
    rec.check("deformed " + to_string(side) + ": exponential soul = ad-series = Hamiltonian formula",
              [&](const GeometrySpec& s) {
                DeformedGeometry d = s.deformation(!o.skip_jacobi);
                FElement fe = solve_F(d, n + 1);
                KElement k{d.base(), fe.fiber_order, fe.k()};
                for (const auto& f : monomials(dim, dim == 1 ? 3 : 2)) {
                  FiberPoly a = soul(deformed_source_target(d, f, side, n));
                  FiberPoly b = s1_via_ad_series(d, f, side, n);
                  FiberPoly c = deformation_from_hamiltonian(k, fe.j(), f, side);
                  if (!a.equals(b) || !a.equals(c)) return verdict(false, "differs on " + f.to_string());
                }
                return verdict(true);
              });
    if (ctx.base().psi && !ctx.base().h_upper) {
      rec.check("deformed " + to_string(side) + ": potential formula", [&](const GeometrySpec& s) {
        DeformedGeometry d = s.deformation(!o.skip_jacobi);
        for (const auto& f : monomials(dim, dim == 1 ? 3 : 2))
          if (!s1_via_potential(d.base(), *s.psi, f, side, n).equals(s1_via_ad_series(d, f, side, n)))
            return verdict(false, "differs on " + f.to_string());
        return verdict(true);
      });
    }
  }
  for (auto& r : rec.rows()) out.push_back(r);
}

bool series_equal(const NuSeries& a, const NuSeries& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (!a[i].equals(b[i])) return false;
  return true;
}

bool op_vanishes(const DiffOp& a) {
  for (int r = 0; r <= a.nu_order(); ++r)
    if (!a.grade(r).empty()) return false;
  return true;
}

void suite_starprod(Context& ctx, std::vector<Check>& out) {
  const Options& o = ctx.opt();
  Recorder rec(ctx, "starprod");
  const int dim = ctx.base().dimension;
  const int r = dim == 1 ? o.nu_order : std::min(o.nu_order, 2);
  if (!ctx.base().has_potential()) {
    rec.add("star product checks", true, "skipped: geometry has no potential");
    for (auto& row : rec.rows()) out.push_back(row);
    return;
  }
  SampleGenerator gen(o.seed);
  std::vector<std::array<JetSeries, 3>> triples;
  for (int i = 0; i < 3; ++i)
    triples.push_back({gen.polynomial(dim, 3, kExact, 3), gen.polynomial(dim, 3, kExact, 3),
                       gen.polynomial(dim, 2, kExact, 3)});
  JetSeries hol = gen.holomorphic(dim, 3, kExact), anti = gen.antiholomorphic(dim, 3, kExact);
  const int ra = std::min(r, 3);  // associativity is the costliest check

  rec.check("unit", [&](const GeometrySpec& s) {
    StarProduct sp(s.potential_data(), r);
    JetSeries one = JetSeries::constant(dim, kExact, Scalar(1));
    for (const auto& t : triples) {
      NuSeries a = star_multiply(sp, t[0], one), b = star_multiply(sp, one, t[0]);
      NuSeries expected(r + 1, JetSeries(dim, kExact));
      expected[0] = t[0];
      if (!series_equal(a, expected) || !series_equal(b, expected)) return verdict(false);
    }
    return verdict(true);
  });
  rec.check("associativity through nu^" + std::to_string(ra), [&](const GeometrySpec& s) {
    StarProduct sp(s.potential_data(), ra);
    for (const auto& t : triples) {
      NuSeries lhs = star_multiply(sp, star_multiply(sp, t[0], t[1]), NuSeries{t[2]});
      NuSeries rhs = star_multiply(sp, NuSeries{t[0]}, star_multiply(sp, t[1], t[2]));
      if (!series_equal(lhs, rhs)) return verdict(false);
    }
    return verdict(true);
  });
  rec.check("C_1 = g^{lk} dbar_l u d_k v and C_1(f,g) - C_1(g,f) = {f,g}", [&](const GeometrySpec& s) {
    StarProduct sp(s.potential_data(), 1);
    const Geometry& g = sp.geometry();
    for (const auto& t : triples) {
      JetSeries c1(dim, kExact);
      for (int l = 0; l < dim; ++l)
        for (int k = 0; k < dim; ++k) c1 += g.g(l, k) * t[0].d_anti(l) * t[1].d_holo(k);
      JetSeries a = star_component(sp, 1, t[0], t[1]), b = star_component(sp, 1, t[1], t[0]);
      if (!a.equals(c1) || !(a - b).equals(chart_bracket(g.g_upper(), t[0], t[1]))) return verdict(false);
    }
    return verdict(true);
  });
  rec.check("separation of variables", [&](const GeometrySpec& s) {
    StarProduct sp(s.potential_data(), r);
    for (const auto& t : triples)
      for (int k = 1; k <= r; ++k)
        if (!star_component(sp, k, t[0] + hol, t[1] + anti).equals(star_component(sp, k, t[0], t[1])))
          return verdict(false, "grade " + std::to_string(k));
    return verdict(true);
  });
  rec.check("sigma(L_f) = S f and sigma(R_f) = T f", [&](const GeometrySpec& s) {
    StarProduct sp(s.potential_data(), r);
    for (const auto& t : triples) {
      if (!sigma_symbol(sp.mult_op(t[0], OpSide::left)).equals(source_target_exp(sp.geometry(), t[0], Side::source, r)))
        return verdict(false, "source");
      if (!sigma_symbol(sp.mult_op(t[0], OpSide::right)).equals(source_target_exp(sp.geometry(), t[0], Side::target, r)))
        return verdict(false, "target");
    }
    return verdict(true);
  });
  rec.check("[L_f, R_g] = 0", [&](const GeometrySpec& s) {
    StarProduct sp(s.potential_data(), ra);
    for (const auto& t : triples) {
      DiffOp lf = sp.mult_op(t[2], OpSide::left), rg = sp.mult_op(t[1], OpSide::right);
      if (!op_vanishes(op_compose(lf, rg) - op_compose(rg, lf))) return verdict(false);
    }
    return verdict(true);
  });
  rec.check("Berezin: B(ab) = b * a and L_b = B b B^{-1}", [&](const GeometrySpec& s) {
    StarProduct sp(s.potential_data(), r);
    DiffOp b = berezin(sp), b_inv = op_inverse(b);
    JetSeries a = gen.holomorphic(dim, 3, kExact), bb = gen.antiholomorphic(dim, 3, kExact);
    bool ok = series_equal(b.apply(a * bb), star_multiply(sp, bb, a));
    ok = ok && sp.mult_op(bb, OpSide::left).equals(op_compose(op_compose(b, DiffOp::multiplication(bb, r)), b_inv));
    ok = ok && sp.mult_op(a, OpSide::right).equals(op_compose(op_compose(b, DiffOp::multiplication(a, r)), b_inv));
    return verdict(ok);
  });
  rec.check("X = nu log B: sharp naturality and sigma(X) = K", [&](const GeometrySpec& s) {
    StarProduct sp(s.potential_data(), r);
    DiffOp x = operator_log(berezin(sp));
    bool natural = naturality_report(x, true).pass();
    FiberPoly k = sigma_symbol(x);
    int deg = std::min(o.fiber_order, k.fiber_order());
    bool same = k.truncated_fiber(deg).equals(solve_K(sp.geometry(), deg).value);
    bool y_natural = naturality_report(parity_hat(x).y).pass();
    return verdict(natural && same && y_natural && zeta_support(k),
                   "compared through fiber degree " + std::to_string(deg));
  });
  rec.check("dual Berezin transform inverts B", [&](const GeometrySpec& s) {
    StarProduct sp(s.potential_data(), std::min(r, 4));
    DualBerezinReport rep = dual_berezin_check(sp, 10, o.seed);
    return verdict(rep.pass, rep.failures.empty() ? "" : rep.failures.front());
  });
  if (ctx.base().psi) {
    rec.check("pair deformation: S_1 and T_1 match the potential formula", [&](const GeometrySpec& s) {
      const int rp = std::min(r, 4);
      PotentialData p = s.potential_data(), q = p;
      if (q.higher.empty()) q.higher.push_back(JetSeries(dim, kExact));
      q.higher[0] += *s.psi;
      StarProduct sp(q, rp), sp_tilde(p, rp);
      for (const auto& f : monomials(dim, dim == 1 ? 3 : 2))
        for (Side side : {Side::source, Side::target})
          if (!pair_s1(sp, sp_tilde, f, side).equals(s1_via_potential(sp.geometry(), *s.psi, f, side, rp - 1)))
            return verdict(false, to_string(side) + " differs on " + f.to_string());
      return verdict(true);
    });
  }
  for (auto& row : rec.rows()) out.push_back(row);
}

void suite_pipeline(Context& ctx, std::vector<Check>& out) {
  const Options& o = ctx.opt();
  Recorder rec(ctx, "pipeline");
  if (!ctx.base().has_potential()) {
    rec.add("sigma(Y) = J/2", true, "skipped: geometry has no potential");
    for (auto& r : rec.rows()) out.push_back(r);
    return;
  }
  const int n = o.fiber_order, r = std::max(o.nu_order, n + 1);
  rec.check("sigma(Y) = J/2 through fiber degree " + std::to_string(n), [&](const GeometrySpec& s) {
    SigmaYReport rep = sigma_y_pipeline(s.potential_data(), n, r);
    std::string detail;
    for (const auto& [d, ok] : rep.degree_ok)
      if (!ok) detail += "degree " + std::to_string(d) + " residual nonzero; ";
    return verdict(rep.pass, detail);
  });
  rec.check("h from X_3 is a deformation of g", [&](const GeometrySpec& s) {
    StarProduct sp(s.potential_data(), 2);
    DeformedGeometry d = h_from_x3(operator_log(berezin(sp)));
    return verdict(jacobi_deformed_check(d).pass);
  });
  for (auto& row : rec.rows()) out.push_back(row);
}

Result run_verify(Context& ctx) {
  const Options& o = ctx.opt();
  std::vector<std::string> chosen = o.suites;
  if (chosen.empty() || std::find(chosen.begin(), chosen.end(), "all") != chosen.end()) chosen = suites();
  std::vector<Check> rows;
  for (const auto& name : chosen) {
    if (name == "axioms")
      suite_axioms(ctx, rows);
    else if (name == "kset")
      suite_kset(ctx, rows);
    else if (name == "starprod")
      suite_starprod(ctx, rows);
    else if (name == "pipeline")
      suite_pipeline(ctx, rows);
    else
      throw Error(ErrorCode::UsageError, "unknown suite '" + name + "' (expected axioms, kset, starprod, pipeline or all)");
  }
  Result res;
  Json checks = Json::array();
  std::string text;
  for (const auto& c : rows) {
    res.pass = res.pass && c.pass;
    checks.push_back({{"suite", c.suite}, {"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    text += std::string(c.pass ? "PASS" : "FAIL") + "  [" + c.suite + "] " + c.name +
            (c.detail.empty() ? "" : "  (" + c.detail + ")") + "\n";
  }
  Json suites_json = Json::array();
  for (const auto& s : chosen) suites_json.push_back(s);
  res.document["payload"] = {{"suites", suites_json}, {"checks", checks}};
  res.text = text;
  return res;
}

// ---------------------------------------------------------------- verbs

Result run_verb(Context& ctx) {
  const Options& o = ctx.opt();
  const int dim = ctx.base().dimension;
  const int m = o.jet_order;
  Result res;
  Json& payload = res.document["payload"];
  std::string& text = res.text;

  if (o.verb == "solve-k") {
    KElement k = ctx.with_headroom(
        m, [&](const GeometrySpec& s) { return solve_K(s.geometry(!o.skip_jacobi), o.fiber_order); },
        [](const KElement& k) { return k.value.jet_order(); });
    payload = {{"K", to_json(k.value)}};
    text = "K = " + k.value.to_string() + "\n";
  } else if (o.verb == "solve-f") {
    FElement f = ctx.with_headroom(
        m, [&](const GeometrySpec& s) { return solve_F(s.deformation(!o.skip_jacobi), o.fiber_order); },
        [](const FElement& f) { return f.value.jet_order(); });
    payload = {{"h_upper", to_json(f.geometry.h_upper())}, {"K", to_json(f.k())}, {"J", to_json(f.j())}};
    text = "K = " + f.k().to_string() + "\nJ = " + f.j().to_string() + "\n";
  } else if (o.verb == "source" || o.verb == "target") {
    Side side = o.verb == "source" ? Side::source : Side::target;
    std::vector<JetSeries> fs =
        o.function ? std::vector<JetSeries>{parse_function(*o.function, dim, "--function")} : coordinate_functions(dim);
    bool deformed = ctx.base().has_deformation();
    Json values = Json::array();
    for (const auto& f : fs) {
      DualFiber v = ctx.with_headroom(
          m,
          [&](const GeometrySpec& s) {
            if (deformed) return deformed_source_target(s.deformation(!o.skip_jacobi), f, side, o.fiber_order);
            return lift(source_target_exp(s.geometry(!o.skip_jacobi), f, side, o.fiber_order));
          },
          [](const DualFiber& v) { return v.jet_order(); });
      Json entry = {{"f", to_json(f)}, {"S0", to_json(body(v))}};
      text += (side == Side::source ? "S(" : "T(") + f.to_string() + ") = " + body(v).to_string() + "\n";
      if (deformed) {
        entry["S1"] = to_json(soul(v));
        text += "  eps part: " + soul(v).to_string() + "\n";
      }
      values.push_back(entry);
    }
    payload = {{"side", to_string(side)}, {"deformed", deformed}, {"values", values}};
  } else if (o.verb == "star") {
    JetSeries f = o.function ? parse_function(*o.function, dim, "--function") : JetSeries::zbar(dim, 0);
    JetSeries g = o.with ? parse_function(*o.with, dim, "--with") : JetSeries::z(dim, 0);
    auto [prod, lf] = ctx.with_headroom(
        m,
        [&](const GeometrySpec& s) {
          StarProduct sp(s.potential_data(), o.nu_order);
          return std::make_pair(star_multiply(sp, f, g), sp.mult_op(f, OpSide::left));
        },
        [](const auto& r) { return series_jet_order(r.first); });
    payload = {{"f", to_json(f)}, {"g", to_json(g)}, {"product", nu_series_json(prod)}, {"left_mult_op", to_json(lf)}};
    text = "f * g:\n" + nu_series_text(prod) + "L_f =\n" + lf.to_string() + "\n";
  } else if (o.verb == "berezin") {
    DiffOp b = ctx.with_headroom(
        m, [&](const GeometrySpec& s) { return berezin(StarProduct(s.potential_data(), o.nu_order)); },
        [](const DiffOp& b) { return b.jet_order(); });
    payload = {{"B", to_json(b)}};
    text = "B =\n" + b.to_string() + "\n";
  } else if (o.verb == "log-x") {
    DiffOp x = ctx.with_headroom(
        m, [&](const GeometrySpec& s) { return operator_log(berezin(StarProduct(s.potential_data(), o.nu_order))); },
        [](const DiffOp& x) { return x.jet_order(); });
    NaturalityReport nat = naturality_report(x, true);
    Json rows = Json::array();
    for (const auto& row : nat.rows)
      rows.push_back({{"grade", row.grade}, {"order", row.order}, {"bound", row.bound}, {"ok", row.ok}});
    FiberPoly k = sigma_symbol(x);
    res.pass = nat.pass();
    payload = {{"X", to_json(x)}, {"naturality", rows}, {"sigma_X", to_json(k)}};
    text = "X =\n" + x.to_string() + "\nsigma(X) = " + k.to_string() + "\n";
  } else if (o.verb == "sigma-y") {
    if (o.nu_order < o.fiber_order + 1)
      throw Error(ErrorCode::UsageError, "sigma-y needs --nu-order >= --fiber-order + 1");
    SigmaYReport rep = ctx.with_headroom(
        m, [&](const GeometrySpec& s) { return sigma_y_pipeline(s.potential_data(), o.fiber_order, o.nu_order); },
        [](const SigmaYReport& r) { return std::min(r.sigma_y.jet_order(), r.half_j.jet_order()); });
    Json degrees = Json::array();
    for (const auto& [d, ok] : rep.degree_ok) {
      degrees.push_back({{"fiber_degree", d}, {"residual_zero", ok}});
      text += std::string(ok ? "PASS" : "FAIL") + "  fiber degree " + std::to_string(d) + "\n";
    }
    res.pass = rep.pass;
    payload = {{"fiber_order", rep.fiber_order},
               {"h_upper", to_json(rep.deformation.h_upper())},
               {"sigma_Y", to_json(rep.sigma_y)},
               {"half_J", to_json(rep.half_j)},
               {"residual", to_json(rep.residual)},
               {"degrees", degrees},
               {"provenance",
                {{"sigma_Y", "symbol of the odd part of the logarithm of the Berezin transform"},
                 {"half_J", "K-set recursion over dual numbers for (g, h) with h read from X_3"}}}};
    text = "sigma(Y) = " + rep.sigma_y.to_string() + "\nJ/2 = " + rep.half_j.to_string() + "\n" + text;
  } else {
    throw Error(ErrorCode::UsageError, "unknown verb '" + o.verb + "'");
  }
  return res;
}

Json input_json(const Options& o) {
  return {{"geometry", o.geometry}, {"fiber_order", o.fiber_order}, {"nu_order", o.nu_order},
          {"jet_order", o.jet_order}, {"seed", o.seed},               {"test_degree", o.test_degree},
          {"skip_jacobi", o.skip_jacobi}};
}

}  // namespace

Result run_command(const Options& opt) {
  if (std::find(verbs().begin(), verbs().end(), opt.verb) == verbs().end())
    throw Error(ErrorCode::UsageError, "unknown verb '" + opt.verb + "'");
  if (opt.fiber_order < 2) throw Error(ErrorCode::UsageError, "--fiber-order must be at least 2");
  if (opt.nu_order < 1) throw Error(ErrorCode::UsageError, "--nu-order must be at least 1");
  if (opt.jet_order < 0) throw Error(ErrorCode::UsageError, "--jet-order must be non-negative");
  if (opt.test_degree < 1) throw Error(ErrorCode::UsageError, "--test-degree must be at least 1");
  parse_side(opt.side);

  Context ctx(opt);
  // Reject a Jacobi-violating input up front rather than per check.
  if (ctx.base().g_upper && !opt.skip_jacobi) ctx.base().geometry(true);
  if (ctx.base().h_upper && !opt.skip_jacobi) ctx.base().deformation(true);

  Result body = opt.verb == "verify" ? run_verify(ctx) : run_verb(ctx);
  Result res;
  res.pass = body.pass;
  res.document["engine"] = kEngine;
  res.document["command"] = opt.verb;
  res.document["input"] = input_json(opt);
  res.document["input"]["spec"] = render(ctx.base());
  res.document["input"]["input_jet_order"] = ctx.input_order();
  res.document["payload"] = body.document["payload"];
  res.document["pass"] = body.pass;
  res.text = std::string(kEngine) + "  " + opt.verb + "  geometry=" + opt.geometry +
             "  N=" + std::to_string(opt.fiber_order) + " R=" + std::to_string(opt.nu_order) +
             " M=" + std::to_string(opt.jet_order) + " seed=" + std::to_string(opt.seed) + "\n" + body.text +
             (body.pass ? "result: pass\n" : "result: FAIL\n");
  return res;
}

Json error_document(const Options& opt, const Error& e) {
  Json doc;
  doc["engine"] = kEngine;
  doc["command"] = opt.verb;
  doc["input"] = input_json(opt);
  doc["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.message()}};
  doc["pass"] = false;
  return doc;
}

}  // namespace sepvar::cli
