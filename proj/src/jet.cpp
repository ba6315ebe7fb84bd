#include "sepvar/jet.hpp"

namespace sepvar {

std::string monomial_string(const MultiIndex& m, const char* holo_name, const char* anti_name) {
  std::string s;
  auto emit = [&](const char* name, int idx, int e) {
    if (e == 0) return;
    if (!s.empty()) s += "*";
    s += name + std::to_string(idx + 1);
    if (e > 1) s += "^" + std::to_string(e);
  };
  for (int k = 0; k < kMaxDim; ++k) emit(holo_name, k, m.holo(k));
  for (int l = 0; l < kMaxDim; ++l) emit(anti_name, l, m.anti(l));
  return s;
}

}  // namespace sepvar
