#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "ldt/geometry.hpp"

namespace ldt {

using Rational = boost::rational<long long>;

struct GrassmannSpec {
  std::uint32_t q;
  int n;
  int k;
  bool affine = false;  // affine flats instead of linear subspaces
};

// Exact eigenvalue of the degree-normalized adjacency operator of the
// Grassmann graph G(k, k-1) over GF(q)^n, for r = 0..k:
//   lambda_r = (-(q^k - 1) + q^r (q^{k-r} - 1)(q^{n-k-r+1} - 1))
//              / ((q^k - 1)(q^{n-k+1} - 2)).
Rational grassmann_eigenvalue(std::uint32_t q, int n, int k, int r);

// Vertices, degree and adjacency of a (affine) Grassmann graph with
// intersection dimension k-1, materialized for brute-force checks.
struct DenseGraph {
  std::vector<AffineFlat> vertices;
  std::vector<std::vector<int>> adj;
  int degree = 0;
};

DenseGraph build_grassmann_graph(const GrassmannSpec& spec, std::uint64_t vertex_cap = 2000);

// Exact 1 - Phi(A): the probability that one step of the random walk from a
// uniform vertex of the subset stays inside it.
double stay_probability(const DenseGraph& graph, const std::vector<char>& subset);

struct EigenvalueEntry {
  double value;
  int multiplicity;
};

struct SpectrumReport {
  std::vector<EigenvalueEntry> eigenvalues;  // descending
  int vertex_count = 0;
  int degree = 0;
};

// Numeric spectrum of the degree-normalized adjacency matrix.
SpectrumReport brute_spectrum(const GrassmannSpec& spec, std::uint64_t vertex_cap = 2000);

// The expansion sandwich mu - 1/(q^{n-k+1} - 2) <= 1 - Phi(A) <= mu + 1/q,
// clamped to [0, 1].
std::pair<double, double> expansion_bounds(double mu, std::uint32_t q, int n, int k);

// The six bipartite inclusion graphs whose second singular values drive the
// sampling arguments. A is the lower side (points or lines), B the higher.
enum class InclusionGraphId { kG1, kG2, kG3, kG4, kG5, kG6 };

struct BipartiteGraph {
  std::vector<std::vector<int>> adj_a;  // neighbors in B per left vertex
  std::vector<std::vector<int>> adj_b;  // neighbors in A per right vertex
  std::vector<std::uint64_t> edge_offset;  // per right vertex, for edge ids
  std::uint64_t edge_count = 0;
  int deg_a = 0;
  int deg_b = 0;
  double top_singular = 0.0;
  double second_singular = 0.0;
};

BipartiteGraph build_inclusion_graph(InclusionGraphId id, std::uint32_t q, int m,
                                     std::uint64_t cell_cap = 30000000);

struct SingularValueReport {
  double exact;
  double paper_approx;
  bool small_m_warning;  // the approximation is stated for m >= 6
  std::size_t left_count;
  std::size_t right_count;
};

SingularValueReport inclusion_singular_value(InclusionGraphId id, std::uint32_t q, int m,
                                             std::uint64_t cell_cap = 30000000);

// Exact deviation check between sampling an edge of E' from a random
// B'-vertex and from a random A-vertex with neighbors restricted to B';
// bound lambda(G)/sqrt(mu(B')). Edge ids are edge_offset[b] + index into
// adj_b[b].
struct SamplingCheck {
  double lhs;
  double bound;
  bool ok;
};

SamplingCheck sampling_deviation_check(const BipartiteGraph& graph,
                                       const std::vector<char>& b_subset,
                                       const std::vector<char>& edge_subset);

}  // namespace ldt
