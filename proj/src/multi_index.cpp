#include "sepvar/multi_index.hpp"

namespace sepvar {

namespace {

long factorial_of(int n) {
  long r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void enumerate_half(int dim, int slot, int remaining, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (slot == dim) {
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    cur[slot] = e;
    enumerate_half(dim, slot + 1, remaining - e, cur, out);
  }
  cur[slot] = 0;
}

std::vector<std::vector<int>> half_indices(int dim, int max_degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(dim, 0);
  if (max_degree >= 0) enumerate_half(dim, 0, max_degree, cur, out);
  return out;
}

}  // namespace

long MultiIndex::factorial() const {
  long r = 1;
  for (int v = 0; v < 2 * kMaxDim; ++v) r *= factorial_of(var(v));
  return r;
}

std::vector<MultiIndex> sub_indices(const MultiIndex& alpha) {
  std::vector<MultiIndex> out{MultiIndex()};
  for (int v = 0; v < 2 * kMaxDim; ++v) {
    int e = alpha.var(v);
    if (e == 0) continue;
    std::vector<MultiIndex> next;
    next.reserve(out.size() * (e + 1));
    for (const auto& m : out)
      for (int i = 0; i <= e; ++i) {
        MultiIndex c = m;
        c.set_var(v, i);
        next.push_back(c);
      }
    out = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

long multi_binomial(const MultiIndex& alpha, const MultiIndex& mu) {
  long r = 1;
  for (int v = 0; v < 2 * kMaxDim; ++v) r *= binomial(alpha.var(v), mu.var(v));
  return r;
}

std::vector<MultiIndex> enumerate_indices(int dim, int max_holo, int max_anti) {
  std::vector<MultiIndex> out;
  for (const auto& h : half_indices(dim, max_holo))
    for (const auto& a : half_indices(dim, max_anti)) out.push_back(MultiIndex::from(h, a));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<MultiIndex> enumerate_total(int dim, int max_total, int max_holo, int max_anti) {
  std::vector<MultiIndex> out;
  for (const auto& m : enumerate_indices(dim, std::min(max_total, max_holo), std::min(max_total, max_anti)))
    if (m.degree() <= max_total) out.push_back(m);
  return out;
}

}  // namespace sepvar
