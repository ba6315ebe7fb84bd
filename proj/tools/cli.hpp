#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spec_io.hpp"

namespace sepvar::cli {

inline constexpr const char* kEngine = "sepvar 0.1.0";

const std::vector<std::string>& verbs();
const std::vector<std::string>& suites();

struct Options {
  std::string verb;
  std::vector<std::string> suites;  // verify only; empty means all
  std::string geometry = "flat";
  int fiber_order = 4;   // N
  int nu_order = 5;      // R
  int jet_order = 12;    // M
  std::optional<std::string> psi;
  std::string side = "source";
  int test_degree = 3;
  std::uint64_t seed = 1;
  std::string output = "json";
  bool skip_jacobi = false;
  std::optional<std::string> function;  // term list as JSON text
  std::optional<std::string> with;      // second argument of `star`
};

struct Result {
  Json document;
  std::string text;  // plain-text rendering
  bool pass = true;
};

/// Runs one verb. Module errors propagate as sepvar::Error.
Result run_command(const Options& opt);

/// Document for a failed run.
Json error_document(const Options& opt, const Error& e);

}  // namespace sepvar::cli
