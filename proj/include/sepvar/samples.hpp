#pragma once

#include <cstdint>
#include <random>

#include "sepvar/diffop.hpp"
#include "sepvar/fiber.hpp"
#include "sepvar/jet.hpp"

namespace sepvar {

/// Seeded generator of random exact polynomial samples.
///
/// Only the raw 64-bit output of mt19937_64 is used (no std distributions),
/// so a seed yields the same samples with every standard library.
class SampleGenerator {
 public:
  explicit SampleGenerator(std::uint64_t seed) : rng_(seed) {}

  /// Uniform integer in [lo, hi].
  long uniform(long lo, long hi) { return lo + static_cast<long>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }

  /// Nonzero rational with numerator and denominator bounded by `height`.
  Scalar rational(long height = 3) {
    long num = uniform(1, height) * (uniform(0, 1) ? 1 : -1);
    return Scalar::rational(num, uniform(1, height));
  }

  /// Random polynomial of total degree <= max_degree with `terms` monomials,
  /// stored at jet order `order`. Degree limits per half restrict to
  /// (anti)holomorphic samples.
  JetSeries polynomial(int dim, int max_degree, int order, int terms = 4, int max_holo = -1, int max_anti = -1) {
    if (max_holo < 0) max_holo = max_degree;
    if (max_anti < 0) max_anti = max_degree;
    JetSeries f(dim, order);
    for (int t = 0; t < terms; ++t) f.add(monomial(dim, max_degree, max_holo, max_anti), rational());
    return f;
  }
  JetSeries holomorphic(int dim, int max_degree, int order, int terms = 3) {
    return polynomial(dim, max_degree, order, terms, max_degree, 0);
  }
  JetSeries antiholomorphic(int dim, int max_degree, int order, int terms = 3) {
    return polynomial(dim, max_degree, order, terms, 0, max_degree);
  }

  /// Random fiber polynomial with fiber degrees in [min_fiber, max_fiber].
  FiberPoly fiber_poly(int dim, int min_fiber, int max_fiber, int fiber_order, int jet_degree, int jet_order,
                       int terms = 4) {
    FiberPoly p(dim, jet_order, fiber_order);
    for (int t = 0; t < terms; ++t) {
      MultiIndex key;
      int target = static_cast<int>(uniform(min_fiber, max_fiber));
      for (int i = 0; i < target; ++i) {
        int v = static_cast<int>(uniform(0, 2 * dim - 1));
        int slot = v < dim ? v : kMaxDim + (v - dim);
        key.set_var(slot, key.var(slot) + 1);
      }
      p.add(key, polynomial(dim, jet_degree, jet_order, 2));
    }
    return p;
  }

  /// Random natural operator: grade r has derivative order <= r.
  DiffOp natural_operator(int dim, int nu_order, int jet_degree, int jet_order, int terms_per_grade = 2) {
    DiffOp op(dim, nu_order);
    for (int r = 0; r <= nu_order; ++r)
      for (int t = 0; t < terms_per_grade; ++t) {
        MultiIndex idx = r == 0 ? MultiIndex() : monomial(dim, static_cast<int>(uniform(0, r)), r, r);
        op.grade(r).lower_jet_order(jet_order);
        op.add_term(r, idx, polynomial(dim, jet_degree, jet_order, 2));
      }
    return op;
  }

  MultiIndex monomial(int dim, int max_degree, int max_holo, int max_anti) {
    MultiIndex m;
    int degree = static_cast<int>(uniform(0, max_degree));
    int holo = 0, anti = 0;
    for (int i = 0; i < degree; ++i) {
      int v = static_cast<int>(uniform(0, 2 * dim - 1));
      if (v < dim) {
        if (holo >= max_holo) continue;
        ++holo;
        m.set_holo(v, m.holo(v) + 1);
      } else {
        if (anti >= max_anti) continue;
        ++anti;
        m.set_anti(v - dim, m.anti(v - dim) + 1);
      }
    }
    return m;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace sepvar
