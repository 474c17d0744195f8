#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldt/estimate.hpp"
#include "ldt/geometry.hpp"
#include "ldt/gf.hpp"
#include "ldt/poly.hpp"

namespace ldt {

// A table T assigning to every k-flat C (k = 3 for cubes, 2 for planes) a
// degree-<= d local polynomial in C's canonical coordinates. Tables are
// implicit: query(C) is a pure function of (seed, canonical encoding of C),
// so the same cube always answers identically, from any worker and in any
// order, without materializing the astronomically many entries.
class CubesTable {
 public:
  struct Params {
    Field field;
    int n;
    int d;
    int k = 3;
    std::uint64_t seed = 0;
  };

  virtual ~CubesTable() = default;

  const Field& field() const { return params_.field; }
  int n() const { return params_.n; }
  int d() const { return params_.d; }
  int k() const { return params_.k; }
  std::uint64_t seed() const { return params_.seed; }

  // Local polynomial of a k-flat, in the flat's canonical coordinates.
  MultiPoly query(const AffineFlat& flat) const;
  // T(C) evaluated at a point of C.
  std::uint32_t value_at(const AffineFlat& flat, std::span<const std::uint32_t> point) const;

  virtual std::string kind() const = 0;
  virtual nlohmann::json descriptor() const = 0;

 protected:
  explicit CubesTable(Params params);
  virtual MultiPoly query_impl(const AffineFlat& flat) const = 0;
  // PRF-derived uniform degree-<= d local polynomial for the flat.
  MultiPoly random_local_poly(const AffineFlat& flat, std::string_view domain) const;
  RngStream flat_stream(const AffineFlat& flat, std::string_view domain) const;

  Params params_;
};

class HonestTable : public CubesTable {
 public:
  HonestTable(Params params, MultiPoly g);
  const MultiPoly& encoded() const { return g_; }
  std::string kind() const override { return "honest"; }
  nlohmann::json descriptor() const override;

 protected:
  MultiPoly query_impl(const AffineFlat& flat) const override;

 private:
  MultiPoly g_;
};

// Per cube, a PRF coin with bias rho decides corruption; corrupted cubes
// answer a PRF-derived uniform degree-<= d local polynomial.
class CorruptedTable : public CubesTable {
 public:
  CorruptedTable(Params params, MultiPoly g, double rho);
  const MultiPoly& encoded() const { return g_; }
  double rho() const { return rho_; }
  std::string kind() const override { return "corrupted"; }
  nlohmann::json descriptor() const override;

 protected:
  MultiPoly query_impl(const AffineFlat& flat) const override;

 private:
  MultiPoly g_;
  double rho_;
};

// Hidden structure of the adversarial construction: hyperplanes W_1..W_h
// with a hidden degree-d polynomial on each, expressed in the hyperplane's
// canonical coordinates.
struct PlantedSpec {
  double c = 0.25;
  std::vector<AffineFlat> hyperplanes;
  std::vector<MultiPoly> hidden;

  // h = round(c q^3) hyperplanes uniform with replacement, hidden
  // polynomials uniform of degree <= d.
  static PlantedSpec sample(const Field& f, int n, int d, double c, std::uint64_t seed);
};

// query(C): the smallest i with W_i containing C answers with the hidden
// polynomial of W_i restricted to C; uncovered flats answer a PRF-derived
// random local polynomial.
class PlantedTable : public CubesTable {
 public:
  PlantedTable(Params params, PlantedSpec spec);
  const PlantedSpec& spec() const { return spec_; }
  // Index of the assigning hyperplane, or -1 when the flat is uncovered.
  int covering_index(const AffineFlat& flat) const;
  std::string kind() const override { return "planted"; }
  nlohmann::json descriptor() const override;

 protected:
  MultiPoly query_impl(const AffineFlat& flat) const override;

 private:
  PlantedSpec spec_;
  // Hyperplane i as the solution set of normal . x = offset; makes the
  // covering scan a handful of dot products.
  std::vector<std::vector<std::uint32_t>> normals_;
  std::vector<std::uint32_t> offsets_;
};

// Entries set explicitly; queries for unset flats throw std::out_of_range.
class ExplicitTable : public CubesTable {
 public:
  explicit ExplicitTable(Params params);
  void set_entry(const AffineFlat& flat, MultiPoly entry);
  std::string kind() const override { return "explicit"; }
  nlohmann::json descriptor() const override;

 protected:
  MultiPoly query_impl(const AffineFlat& flat) const override;

 private:
  std::map<std::string, MultiPoly> entries_;
};

nlohmann::json flat_to_json(const AffineFlat& flat);
AffineFlat flat_from_json(const Field& f, const nlohmann::json& j);

// Reloading a descriptor reproduces the identical table bit for bit.
std::unique_ptr<CubesTable> table_from_descriptor(const nlohmann::json& j);

// Monte Carlo estimate of Pr_C[T(C) = g|_C] over uniform k-flats.
Estimate table_agreement(const CubesTable& table, const MultiPoly& g,
                         std::uint64_t trials, std::uint64_t seed, int threads = 0);

}  // namespace ldt
