#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"

int main(int argc, char** argv) {
  using namespace sepvar::cli;
  Options opt;
  CLI::App app{"Formal symplectic groupoids and star products with separation of variables"};
  app.add_option("verb", opt.verb, "solve-k | solve-f | source | target | star | berezin | log-x | sigma-y | verify")
      ->required()
      ->check(CLI::IsMember(verbs()));
  app.add_option("suites", opt.suites, "verify: axioms | kset | starprod | pipeline | all");
  app.add_option("--geometry", opt.geometry, "preset (flat, disc, fubini-study) or JSON geometry file")
      ->capture_default_str();
  app.add_option("--fiber-order", opt.fiber_order, "fiber truncation order N")->capture_default_str();
  app.add_option("--nu-order", opt.nu_order, "nu truncation order R")->capture_default_str();
  app.add_option("--jet-order", opt.jet_order, "jet order M; presets are expanded until results reach it")
      ->capture_default_str();
  app.add_option("--psi", opt.psi, "JSON file whose \"psi\" section deforms the geometry");
  app.add_option("--side", opt.side, "source | target")->capture_default_str();
  app.add_option("--test-degree", opt.test_degree, "monomial degree for membership tests")->capture_default_str();
  app.add_option("--seed", opt.seed, "seed of the sample generator")->capture_default_str();
  app.add_option("--output", opt.output, "json | text")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  app.add_flag("--skip-jacobi", opt.skip_jacobi, "do not check the Jacobi identities of the input");
  app.add_option("--function", opt.function, "function as a JSON term list, e.g. '[{\"z\":[1],\"zbar\":[2],\"re\":\"1/2\"}]'");
  app.add_option("--with", opt.with, "second factor for star, as a JSON term list");
  CLI11_PARSE(app, argc, argv);

  if (opt.verb != "verify" && !opt.suites.empty()) {
    std::cerr << "error: only verify takes positional suite names\n";
    return 2;
  }
  try {
    Result r = run_command(opt);
    if (opt.output == "json")
      std::cout << r.document.dump(2) << "\n";
    else
      std::cout << r.text;
    return r.pass ? 0 : 1;
  } catch (const sepvar::Error& e) {
    if (opt.output == "json")
      std::cout << error_document(opt, e).dump(2) << "\n";
    else
      std::cout << e.what() << "\n";
    return 2;
  }
}
