#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldt/gf.hpp"
#include "ldt/linalg.hpp"

namespace ldt {

// Affine map t |-> base + t * rows from GF(q)^in_dim to GF(q)^out_dim.
// Carries a specific parameterization, unlike AffineFlat which is always
// canonical; restrictions of polynomials compose through these.
struct AffineMap {
  int in_dim = 0;
  int out_dim = 0;
  std::vector<std::uint32_t> base;  // out_dim
  std::vector<std::uint32_t> rows;  // in_dim x out_dim, row-major

  std::vector<std::uint32_t> apply(const Field& f,
                                   std::span<const std::uint32_t> t) const;
};

// A k-dimensional affine subspace of GF(q)^n in canonical form: the
// direction basis is the reduced row echelon form of the direction space
// and the base point is reduced to zero on every pivot column. Two flats
// describe the same point set iff their representations are identical.
class AffineFlat {
 public:
  // Canonical flat spanned by base + <spanning vectors>. Dependent or zero
  // spanning vectors are reduced away.
  static AffineFlat canonicalize(const Field& f,
                                 std::span<const std::uint32_t> base,
                                 const std::vector<std::vector<std::uint32_t>>& spanning);
  static AffineFlat from_point(const Field& f, std::span<const std::uint32_t> p);
  static AffineFlat whole_space(const Field& f, int n);

  const Field& field() const { return field_; }
  int ambient_dim() const { return n_; }
  int dim() const { return k_; }
  std::span<const std::uint32_t> base() const { return base_; }
  std::span<const std::uint32_t> basis_row(int i) const {
    return {basis_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)};
  }
  const std::vector<int>& pivots() const { return pivots_; }

  std::vector<std::uint32_t> embed(std::span<const std::uint32_t> t) const;
  bool contains_point(std::span<const std::uint32_t> p) const;
  bool contains_flat(const AffineFlat& other) const;
  // Local coordinates of a contained point / direction; nullopt otherwise.
  std::optional<std::vector<std::uint32_t>> local_point(std::span<const std::uint32_t> p) const;
  std::optional<std::vector<std::uint32_t>> local_direction(std::span<const std::uint32_t> dir) const;

  // The parameterization t |-> base + t * basis as an affine map into the
  // ambient space.
  AffineMap as_map() const;

  // Stable byte encoding (n, k, basis row-major, base), one little-endian
  // 64-bit word per value. Keys implicit tables; must not change.
  std::string encode() const;

  bool operator==(const AffineFlat& other) const;
  bool operator!=(const AffineFlat& other) const { return !(*this == other); }

 private:
  AffineFlat(const Field& f, int n, int k) : field_(f), n_(n), k_(k) {}

  friend class FlatEnumerator;

  Field field_;
  int n_;
  int k_;
  std::vector<std::uint32_t> basis_;
  std::vector<std::uint32_t> base_;
  std::vector<int> pivots_;
};

// inner expressed in outer's local coordinates while keeping inner's own
// canonical parameterization, so entries restricted through the result are
// directly comparable across different outer flats. Throws when inner is
// not contained in outer.
AffineMap localize_map(const AffineFlat& outer, const AffineFlat& inner);

// Canonical intersection, or nullopt when the flats are disjoint.
std::optional<AffineFlat> intersect(const AffineFlat& a, const AffineFlat& b);

struct FlatConstraints {
  std::vector<AffineFlat> contain;
  std::vector<std::vector<std::uint32_t>> contain_points;
  std::optional<AffineFlat> within;
};

// Uniform over all k-flats satisfying the constraints: the constraint hull
// is completed with uniform direction vectors, rejecting dependent draws,
// and canonicalized. Throws std::invalid_argument on infeasible constraints.
AffineFlat sample_flat(const Field& f, int n, int k, RngStream& rng,
                       const FlatConstraints& constraints = {});

struct FlatPair {
  AffineFlat through;  // the sampled ell-flat both members contain
  AffineFlat first;
  AffineFlat second;
  int intersection_dim;  // dim(first cap second); may exceed ell
};

// Uniform ell-flat U (containing the optional constraints), then two
// independent uniform k-flats containing U.
FlatPair sample_edge(const Field& f, int n, int k, int ell, RngStream& rng,
                     const FlatConstraints& through = {});

struct EnumerateOptions {
  std::optional<AffineFlat> within;
  std::optional<AffineFlat> containing;
  bool linear_only = false;  // only flats through the origin with base 0
  std::uint64_t cap = 1000000;
};

// Streams every qualifying flat exactly once, in canonical form. Throws
// ResourceCapError when the candidate count exceeds the cap.
class FlatEnumerator {
 public:
  FlatEnumerator(const Field& f, int n, int k, EnumerateOptions options = {});
  std::optional<AffineFlat> next();

 private:
  bool advance_state();
  void load_pivots();
  AffineFlat materialize() const;

  Field field_;
  int n_;            // enumeration happens in this many dims (local if within)
  int k_;
  EnumerateOptions options_;
  std::vector<int> pivot_cols_;
  std::vector<std::pair<int, int>> free_cells_;  // (row, col) of free basis entries
  std::vector<std::uint32_t> free_vals_;
  std::vector<int> base_cols_;  // non-pivot columns carrying base coordinates
  std::vector<std::uint32_t> base_vals_;
  bool done_ = false;
  bool fresh_pivots_ = true;
};

std::vector<AffineFlat> enumerate_flats(const Field& f, int n, int k,
                                        EnumerateOptions options = {});

// Exact counts; throw ResourceCapError if the value would overflow 2^63.
std::uint64_t gaussian_binomial(std::uint32_t q, int n, int k);
std::uint64_t count_affine_flats(std::uint32_t q, int n, int k);

}  // namespace ldt
