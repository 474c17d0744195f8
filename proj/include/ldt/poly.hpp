#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldt/geometry.hpp"
#include "ldt/gf.hpp"

namespace ldt {

// Monomials of total degree <= degree in nvars variables, in graded
// lexicographic order: degrees ascend, and within one degree exponent
// vectors are lexicographically descending (x1-heavy first). The monomials
// of a lower bound are a prefix of those of a higher bound, which keeps
// cross-bound comparisons cheap. Tables are cached per (nvars, degree).
class MonomialTable {
 public:
  static std::shared_ptr<const MonomialTable> get(int nvars, int degree);

  int nvars() const { return nvars_; }
  int degree() const { return degree_; }
  int count() const { return static_cast<int>(exps_.size()); }
  std::span<const std::uint8_t> exponents(int idx) const {
    return {exps_[idx].data(), exps_[idx].size()};
  }
  int total_degree(int idx) const { return degrees_[idx]; }
  // Index of an exponent vector, or -1 when it exceeds the bound.
  int index_of(std::span<const std::uint8_t> exps) const;
  // Index of the product monomial, or -1 when the degrees overflow the bound.
  int product_index(int i, int j) const { return products_[static_cast<std::size_t>(i) * count() + j]; }

 private:
  MonomialTable(int nvars, int degree);

  int nvars_;
  int degree_;
  std::vector<std::vector<std::uint8_t>> exps_;
  std::vector<int> degrees_;
  std::vector<int> products_;
};

// Dense multivariate polynomial of bounded total degree over GF(q).
// Coefficients are indexed by the shared MonomialTable of (nvars, bound).
class MultiPoly {
 public:
  MultiPoly(const Field& f, int nvars, int degree_bound);

  const Field& field() const { return field_; }
  int nvars() const { return table_->nvars(); }
  int degree_bound() const { return table_->degree(); }
  const MonomialTable& table() const { return *table_; }
  std::span<const std::uint32_t> coeffs() const { return coeffs_; }
  std::uint32_t coeff(int idx) const { return coeffs_[idx]; }
  void set_coeff(int idx, std::uint32_t v) { coeffs_[idx] = v % field_.q(); }
  std::uint32_t coeff_of(std::span<const std::uint8_t> exps) const;
  void set_coeff_of(std::span<const std::uint8_t> exps, std::uint32_t v);

  std::uint32_t evaluate(std::span<const std::uint32_t> point) const;
  int actual_degree() const;  // 0 for the zero polynomial
  bool is_zero() const;

  // Semantic equality: coefficient mappings agree, absent meaning zero.
  // Different degree bounds are fine; different q or nvars compare unequal.
  bool operator==(const MultiPoly& other) const;
  bool operator!=(const MultiPoly& other) const { return !(*this == other); }

 private:
  Field field_;
  std::shared_ptr<const MonomialTable> table_;
  std::vector<std::uint32_t> coeffs_;
};

MultiPoly add(const MultiPoly& a, const MultiPoly& b);
MultiPoly sub(const MultiPoly& a, const MultiPoly& b);
// Product container bound is the sum of the operand bounds.
MultiPoly mul(const MultiPoly& a, const MultiPoly& b);

// Symbolic substitution p(map(t)): the polynomial q with
// q(t) = p(base + sum_j t_j row_j), in map.in_dim variables, same degree
// bound. The parameterization of the map is preserved exactly, so entries
// restricted to a shared flat through localize_map stay comparable.
MultiPoly restrict_to(const MultiPoly& p, const AffineMap& map);
// Restriction to a flat's canonical parameterization.
MultiPoly restrict_to(const MultiPoly& p, const AffineFlat& flat);

enum class FitStatus {
  kOk,
  kInconsistent,    // values not explained by any polynomial within the bound
  kUnderdetermined  // samples do not pin the polynomial down
};

struct InterpolationResult {
  FitStatus status;
  std::optional<MultiPoly> poly;
};

// Unique degree-<= d polynomial through the samples, obtained by solving
// the linear system over GF(q).
InterpolationResult interpolate(const Field& f, int nvars, int degree,
                                const std::vector<std::vector<std::uint32_t>>& points,
                                const std::vector<std::uint32_t>& values);

// Three-variable wrapper used to materialize cube entries; requires
// degree + 1 <= q so grid values determine the polynomial.
InterpolationResult interpolate_cube(const Field& f, int degree,
                                     const std::vector<std::vector<std::uint32_t>>& points,
                                     const std::vector<std::uint32_t>& values);

struct AgreementOptions {
  std::uint64_t exhaustive_cap = 10000000;  // max number of domain points
  std::uint64_t trials = 100000;            // Monte Carlo fallback
  std::uint64_t seed = 0;
};

struct Agreement {
  std::uint64_t agree = 0;
  std::uint64_t total = 0;
  bool exact = true;
  double value() const { return total == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(total); }
};

// Fraction of domain points where the two polynomials agree; exhaustive when
// q^m fits under the cap, Monte Carlo otherwise.
Agreement fraction_agreement(const MultiPoly& a, const MultiPoly& b,
                             const AgreementOptions& options = {});

// Uniform coefficients over all monomials within the bound.
MultiPoly random_poly(const Field& f, int nvars, int degree, RngStream& rng);

// Text record: q/m/d header plus nonzero (exponent vector, coefficient)
// pairs in graded-lex order. Round-trips exactly.
std::string to_text(const MultiPoly& p);
MultiPoly from_text(const std::string& text);

}  // namespace ldt
