#include "ldt/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "ldt/errors.hpp"

namespace ldt {

namespace {

long long checked_pow(std::uint32_t q, int e) {
  long long v = 1;
  for (int i = 0; i < e; ++i) {
    if (v > (1ll << 62) / q) throw ResourceCapError("power overflows in eigenvalue formula");
    v *= q;
  }
  return v;
}

}  // namespace

Rational grassmann_eigenvalue(std::uint32_t q, int n, int k, int r) {
  if (!(0 <= r && r <= k && k <= n)) {
    throw std::invalid_argument("grassmann_eigenvalue requires 0 <= r <= k <= n");
  }
  const long long qk = checked_pow(q, k);
  const long long qr = checked_pow(q, r);
  const long long qkr = checked_pow(q, k - r);
  const long long qnkr = checked_pow(q, n - k - r + 1);
  const long long qnk = checked_pow(q, n - k + 1);
  const long long numerator = -(qk - 1) + qr * (qkr - 1) * (qnkr - 1);
  const long long denominator = (qk - 1) * (qnk - 2);
  return Rational(numerator, denominator);
}

DenseGraph build_grassmann_graph(const GrassmannSpec& spec, std::uint64_t vertex_cap) {
  Field f(spec.q);
  const std::uint64_t count = spec.affine ? count_affine_flats(spec.q, spec.n, spec.k)
                                          : gaussian_binomial(spec.q, spec.n, spec.k);
  if (count > vertex_cap) throw ResourceCapError("grassmann graph exceeds the vertex cap");

  EnumerateOptions options;
  options.linear_only = !spec.affine;
  options.cap = vertex_cap;
  DenseGraph graph;
  graph.vertices = enumerate_flats(f, spec.n, spec.k, options);
  const int nv = static_cast<int>(graph.vertices.size());
  graph.adj.assign(nv, {});

  for (int i = 0; i < nv; ++i) {
    for (int j = i + 1; j < nv; ++j) {
      auto meet = intersect(graph.vertices[i], graph.vertices[j]);
      if (meet && meet->dim() == spec.k - 1) {
        graph.adj[i].push_back(j);
        graph.adj[j].push_back(i);
      }
    }
  }
  graph.degree = static_cast<int>(graph.adj.empty() ? 0 : graph.adj[0].size());
  for (const auto& nbrs : graph.adj) {
    if (static_cast<int>(nbrs.size()) != graph.degree) {
      throw std::logic_error("grassmann graph is not regular");
    }
  }
  return graph;
}

double stay_probability(const DenseGraph& graph, const std::vector<char>& subset) {
  if (subset.size() != graph.vertices.size()) {
    throw std::invalid_argument("subset indicator has wrong length");
  }
  std::uint64_t inside = 0, stay = 0;
  for (std::size_t v = 0; v < subset.size(); ++v) {
    if (!subset[v]) continue;
    ++inside;
    for (int u : graph.adj[v]) stay += subset[u] != 0;
  }
  if (inside == 0) throw std::invalid_argument("subset is empty");
  return static_cast<double>(stay) /
         (static_cast<double>(inside) * static_cast<double>(graph.degree));
}

SpectrumReport brute_spectrum(const GrassmannSpec& spec, std::uint64_t vertex_cap) {
  DenseGraph graph = build_grassmann_graph(spec, vertex_cap);
  const int nv = static_cast<int>(graph.vertices.size());
  Eigen::MatrixXd walk = Eigen::MatrixXd::Zero(nv, nv);
  for (int i = 0; i < nv; ++i) {
    for (int j : graph.adj[i]) walk(i, j) = 1.0 / graph.degree;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(walk);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");

  SpectrumReport report;
  report.vertex_count = nv;
  report.degree = graph.degree;
  std::vector<double> values(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + nv);
  std::sort(values.begin(), values.end(), std::greater<>());
  for (double v : values) {
    if (!report.eigenvalues.empty() &&
        std::abs(report.eigenvalues.back().value - v) < 1e-9) {
      ++report.eigenvalues.back().multiplicity;
    } else {
      report.eigenvalues.push_back({v, 1});
    }
  }
  return report;
}

std::pair<double, double> expansion_bounds(double mu, std::uint32_t q, int n, int k) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("measure must lie in [0, 1]");
  const double denom = static_cast<double>(checked_pow(q, n - k + 1)) - 2.0;
  double lower = mu - 1.0 / denom;
  double upper = mu + 1.0 / static_cast<double>(q);
  lower = std::clamp(lower, 0.0, 1.0);
  upper = std::clamp(upper, 0.0, 1.0);
  return {lower, upper};
}

namespace {

struct InclusionSides {
  std::vector<AffineFlat> left;   // lower-dimensional side (points as 0-flats)
  std::vector<AffineFlat> right;  // higher-dimensional side
  bool small_m_warning = false;
  double paper_approx = 0.0;
};

InclusionSides build_sides(InclusionGraphId id, std::uint32_t q, int m, std::uint64_t cap) {
  Field f(q);
  InclusionSides sides;
  const double sq = std::sqrt(static_cast<double>(q));
  EnumerateOptions plain;
  plain.cap = cap;

  auto origin = [&] { return AffineFlat::from_point(f, std::vector<std::uint32_t>(m, 0)); };
  auto through_origin = [&](int k) {
    EnumerateOptions o;
    o.linear_only = true;
    o.cap = cap;
    return enumerate_flats(f, m, k, o);
  };

  switch (id) {
    case InclusionGraphId::kG1: {
      // Lines avoiding x vs cubes through x, x = 0.
      auto all_lines = enumerate_flats(f, m, 1, plain);
      const std::vector<std::uint32_t> zero(m, 0);
      for (auto& l : all_lines) {
        if (!l.contains_point(zero)) sides.left.push_back(std::move(l));
      }
      sides.right = through_origin(3);
      sides.paper_approx = 1.0 / sq;
      sides.small_m_warning = m < 6;
      break;
    }
    case InclusionGraphId::kG2: {
      sides.left = through_origin(1);
      sides.right = through_origin(3);
      sides.paper_approx = 1.0 / q;
      sides.small_m_warning = m < 6;
      break;
    }
    case InclusionGraphId::kG3: {
      const std::vector<std::uint32_t> zero(m, 0);
      for (auto& p : enumerate_flats(f, m, 0, plain)) {
        if (!p.contains_point(zero)) sides.left.push_back(std::move(p));
      }
      sides.right = through_origin(3);
      sides.paper_approx = 1.0 / q;
      sides.small_m_warning = m < 6;
      break;
    }
    case InclusionGraphId::kG4: {
      // Points off a fixed line vs cubes containing it.
      std::vector<std::uint32_t> e1(m, 0);
      e1[0] = 1;
      AffineFlat line = AffineFlat::canonicalize(f, std::vector<std::uint32_t>(m, 0), {e1});
      for (auto& p : enumerate_flats(f, m, 0, plain)) {
        if (!line.contains_point(p.base())) sides.left.push_back(std::move(p));
      }
      EnumerateOptions over;
      over.containing = line;
      over.cap = cap;
      sides.right = enumerate_flats(f, m, 3, over);
      sides.paper_approx = 1.0 / sq;
      sides.small_m_warning = m < 6;
      break;
    }
    case InclusionGraphId::kG5: {
      sides.left = enumerate_flats(f, m, 0, plain);
      sides.right = enumerate_flats(f, m, 3, plain);
      sides.paper_approx = std::pow(static_cast<double>(q), -1.5);
      sides.small_m_warning = m < 6;
      break;
    }
    case InclusionGraphId::kG6: {
      // Points of GF(q)^3 vs all lines; m is fixed by the definition.
      sides.left = enumerate_flats(f, 3, 0, plain);
      sides.right = enumerate_flats(f, 3, 1, plain);
      sides.paper_approx = 1.0 / sq;
      sides.small_m_warning = false;
      break;
    }
  }
  return sides;
}

}  // namespace

BipartiteGraph build_inclusion_graph(InclusionGraphId id, std::uint32_t q, int m,
                                     std::uint64_t cell_cap) {
  InclusionSides sides = build_sides(id, q, m, cell_cap);
  const std::size_t na = sides.left.size();
  const std::size_t nb = sides.right.size();
  if (na == 0 || nb == 0) throw std::invalid_argument("inclusion graph side is empty");
  if (static_cast<std::uint64_t>(na) * nb > cell_cap) {
    throw ResourceCapError("inclusion graph exceeds the cell cap");
  }

  BipartiteGraph graph;
  graph.adj_a.assign(na, {});
  graph.adj_b.assign(nb, {});
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t a = 0; a < na; ++a) {
      const bool edge = sides.left[a].dim() == 0
                            ? sides.right[b].contains_point(sides.left[a].base())
                            : sides.right[b].contains_flat(sides.left[a]);
      if (edge) {
        graph.adj_a[a].push_back(static_cast<int>(b));
        graph.adj_b[b].push_back(static_cast<int>(a));
      }
    }
  }
  graph.deg_a = static_cast<int>(graph.adj_a[0].size());
  graph.deg_b = static_cast<int>(graph.adj_b[0].size());
  for (const auto& nbrs : graph.adj_a) {
    if (static_cast<int>(nbrs.size()) != graph.deg_a) {
      throw std::logic_error("inclusion graph is not left-regular");
    }
  }
  for (const auto& nbrs : graph.adj_b) {
    if (static_cast<int>(nbrs.size()) != graph.deg_b) {
      throw std::logic_error("inclusion graph is not right-regular");
    }
  }
  graph.edge_offset.resize(nb);
  std::uint64_t offset = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    graph.edge_offset[b] = offset;
    offset += graph.adj_b[b].size();
  }
  graph.edge_count = offset;

  // Singular values of the normalized walk operator via the Gram matrix of
  // the smaller side.
  const bool left_small = na <= nb;
  const std::size_t small = left_small ? na : nb;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<int>(small), static_cast<int>(small));
  if (left_small) {
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& nbrs = graph.adj_b[b];
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        for (std::size_t j = 0; j < nbrs.size(); ++j) gram(nbrs[i], nbrs[j]) += 1.0;
      }
    }
  } else {
    for (std::size_t a = 0; a < na; ++a) {
      const auto& nbrs = graph.adj_a[a];
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        for (std::size_t j = 0; j < nbrs.size(); ++j) gram(nbrs[i], nbrs[j]) += 1.0;
      }
    }
  }
  gram /= static_cast<double>(graph.deg_a) * static_cast<double>(graph.deg_b);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) throw std::runtime_error("gram eigendecomposition failed");
  std::vector<double> eigs(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + small);
  std::sort(eigs.begin(), eigs.end(), std::greater<>());
  graph.top_singular = std::sqrt(std::max(0.0, eigs[0]));
  graph.second_singular = eigs.size() > 1 ? std::sqrt(std::max(0.0, eigs[1])) : 0.0;
  return graph;
}

SingularValueReport inclusion_singular_value(InclusionGraphId id, std::uint32_t q, int m,
                                             std::uint64_t cell_cap) {
  InclusionSides sides = build_sides(id, q, m, cell_cap);
  BipartiteGraph graph = build_inclusion_graph(id, q, m, cell_cap);
  return {graph.second_singular, sides.paper_approx, sides.small_m_warning,
          graph.adj_a.size(), graph.adj_b.size()};
}

SamplingCheck sampling_deviation_check(const BipartiteGraph& graph,
                                       const std::vector<char>& b_subset,
                                       const std::vector<char>& edge_subset) {
  if (b_subset.size() != graph.adj_b.size()) {
    throw std::invalid_argument("B' indicator has wrong length");
  }
  if (edge_subset.size() != graph.edge_count) {
    throw std::invalid_argument("E' indicator has wrong length");
  }
  std::uint64_t b_count = 0;
  double from_b = 0.0;
  for (std::size_t b = 0; b < b_subset.size(); ++b) {
    if (!b_subset[b]) continue;
    ++b_count;
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < graph.adj_b[b].size(); ++i) {
      hits += edge_subset[graph.edge_offset[b] + i] != 0;
    }
    from_b += static_cast<double>(hits) / static_cast<double>(graph.adj_b[b].size());
  }
  if (b_count == 0) throw std::invalid_argument("B' is empty");
  from_b /= static_cast<double>(b_count);

  // Edge ids live on the B side; index them from A through the offsets.
  double from_a = 0.0;
  std::uint64_t a_valid = 0;
  for (std::size_t a = 0; a < graph.adj_a.size(); ++a) {
    std::uint64_t in_b = 0, hits = 0;
    for (int b : graph.adj_a[a]) {
      if (!b_subset[b]) continue;
      ++in_b;
      const auto& nbrs = graph.adj_b[b];
      const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), static_cast<int>(a));
      const std::uint64_t idx = static_cast<std::uint64_t>(it - nbrs.begin());
      hits += edge_subset[graph.edge_offset[b] + idx] != 0;
    }
    if (in_b == 0) continue;
    ++a_valid;
    from_a += static_cast<double>(hits) / static_cast<double>(in_b);
  }
  if (a_valid > 0) from_a /= static_cast<double>(a_valid);

  const double mu = static_cast<double>(b_count) / static_cast<double>(graph.adj_b.size());
  SamplingCheck check;
  check.lhs = std::abs(from_b - from_a);
  check.bound = graph.second_singular / std::sqrt(mu);
  check.ok = check.lhs <= check.bound + 1e-12;
  return check;
}

}  // namespace ldt
