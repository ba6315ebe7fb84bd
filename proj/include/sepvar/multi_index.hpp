#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sepvar/errors.hpp"

namespace sepvar {

inline constexpr int kMaxDim = 4;

/// Truncation order meaning "no truncation": the object is an exact polynomial.
inline constexpr int kExact = std::numeric_limits<int>::max() / 4;

inline constexpr int lower_order(int order, int by = 1) { return order >= kExact ? kExact : order - by; }
inline constexpr int raise_order(int order, int by) { return order >= kExact ? kExact : std::min(kExact, order + by); }

/// Paired holomorphic/antiholomorphic multidegree packed into one word.
///
/// Byte 7-k holds the exponent of the k-th holomorphic variable and byte
/// 3-l that of the l-th antiholomorphic one, so integer comparison is the
/// lexicographic order on (z^1..z^4, zbar^1..zbar^4). The same key type is
/// used for base monomials, fiber monomials (zeta, zetabar) and derivative
/// multi-indices.
class MultiIndex {
 public:
  constexpr MultiIndex() = default;
  constexpr explicit MultiIndex(std::uint64_t packed) : packed_(packed) {}

  static MultiIndex unit_holo(int k, int power = 1) {
    MultiIndex m;
    m.set_holo(k, power);
    return m;
  }
  static MultiIndex unit_anti(int l, int power = 1) {
    MultiIndex m;
    m.set_anti(l, power);
    return m;
  }
  static MultiIndex from(const std::vector<int>& holo, const std::vector<int>& anti) {
    if (holo.size() > kMaxDim || anti.size() > kMaxDim)
      throw Error(ErrorCode::DimensionMismatch, "multi-index longer than the supported dimension");
    MultiIndex m;
    for (std::size_t i = 0; i < holo.size(); ++i) m.set_holo(static_cast<int>(i), holo[i]);
    for (std::size_t i = 0; i < anti.size(); ++i) m.set_anti(static_cast<int>(i), anti[i]);
    return m;
  }

  constexpr int holo(int k) const { return static_cast<int>((packed_ >> shift_holo(k)) & 0xFF); }
  constexpr int anti(int l) const { return static_cast<int>((packed_ >> shift_anti(l)) & 0xFF); }
  /// Variable index v in [0, 2*kMaxDim): v < kMaxDim is holomorphic.
  constexpr int var(int v) const { return v < kMaxDim ? holo(v) : anti(v - kMaxDim); }

  void set_holo(int k, int e) { set_byte(shift_holo(k), e); }
  void set_anti(int l, int e) { set_byte(shift_anti(l), e); }
  void set_var(int v, int e) { v < kMaxDim ? set_holo(v, e) : set_anti(v - kMaxDim, e); }

  constexpr int holo_degree() const {
    int d = 0;
    for (int k = 0; k < kMaxDim; ++k) d += holo(k);
    return d;
  }
  constexpr int anti_degree() const {
    int d = 0;
    for (int l = 0; l < kMaxDim; ++l) d += anti(l);
    return d;
  }
  constexpr int degree() const { return holo_degree() + anti_degree(); }
  constexpr bool is_zero() const { return packed_ == 0; }
  constexpr std::uint64_t packed() const { return packed_; }

  /// Componentwise <=.
  bool divides(const MultiIndex& o) const {
    for (int v = 0; v < 2 * kMaxDim; ++v)
      if (var(v) > o.var(v)) return false;
    return true;
  }

  /// Componentwise sum; throws if any exponent would exceed 255.
  friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    std::uint64_t s = a.packed_ + b.packed_;
    // A carry out of any byte shows up in the low bit of the next one.
    if (((a.packed_ ^ b.packed_ ^ s) & 0x0101010101010100ULL) != 0 || s < a.packed_)
      throw Error(ErrorCode::TruncationInsufficient, "exponent out of range");
    return MultiIndex(s);
  }
  /// Componentwise difference; requires b.divides(a).
  friend MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
    return MultiIndex(a.packed_ - b.packed_);
  }

  friend constexpr auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

  /// n!-style factorial product alpha! * beta!.
  long factorial() const;

  /// Highest variable index in use (+1 per half), for dimension checks.
  int used_dim() const {
    int d = 0;
    for (int k = 0; k < kMaxDim; ++k)
      if (holo(k) != 0 || anti(k) != 0) d = k + 1;
    return d;
  }

  std::vector<int> holo_vector(int dim) const {
    std::vector<int> out(dim);
    for (int k = 0; k < dim; ++k) out[k] = holo(k);
    return out;
  }
  std::vector<int> anti_vector(int dim) const {
    std::vector<int> out(dim);
    for (int l = 0; l < dim; ++l) out[l] = anti(l);
    return out;
  }

  /// Swaps holomorphic and antiholomorphic halves.
  MultiIndex swapped() const {
    MultiIndex m;
    for (int k = 0; k < kMaxDim; ++k) {
      m.set_holo(k, anti(k));
      m.set_anti(k, holo(k));
    }
    return m;
  }

 private:
  static constexpr int shift_holo(int k) { return 8 * (7 - k); }
  static constexpr int shift_anti(int l) { return 8 * (3 - l); }

  void set_byte(int shift, int e) {
    if (e < 0 || e > 255) throw Error(ErrorCode::TruncationInsufficient, "exponent out of range");
    packed_ = (packed_ & ~(std::uint64_t{0xFF} << shift)) | (std::uint64_t(e) << shift);
  }

  std::uint64_t packed_ = 0;
};

/// All multi-indices mu <= alpha (componentwise), in increasing order.
std::vector<MultiIndex> sub_indices(const MultiIndex& alpha);

/// Product of componentwise binomials C(alpha, mu).
long multi_binomial(const MultiIndex& alpha, const MultiIndex& mu);

/// All multi-indices over `dim` holomorphic and antiholomorphic slots with
/// holo degree <= max_holo and anti degree <= max_anti.
std::vector<MultiIndex> enumerate_indices(int dim, int max_holo, int max_anti);

/// All multi-indices over `dim` slots with total degree <= max_total
/// (holomorphic part limited to max_holo and antiholomorphic to max_anti).
std::vector<MultiIndex> enumerate_total(int dim, int max_total, int max_holo, int max_anti);

}  // namespace sepvar
