#include "ldt/tables.hpp"

#include <cmath>
#include <stdexcept>

#include "ldt/runner.hpp"

namespace ldt {

CubesTable::CubesTable(Params params) : params_(std::move(params)) {
  if (params_.n < 1) throw std::invalid_argument("table ambient dimension must be positive");
  if (params_.k < 1 || params_.k > params_.n) {
    throw std::invalid_argument("table subspace dimension out of range");
  }
  if (params_.d < 0) throw std::invalid_argument("table degree must be nonnegative");
}

MultiPoly CubesTable::query(const AffineFlat& flat) const {
  params_.field.require_same(flat.field());
  if (flat.ambient_dim() != params_.n) {
    throw std::invalid_argument("queried flat has wrong ambient dimension");
  }
  if (flat.dim() != params_.k) {
    throw std::invalid_argument("queried flat has wrong subspace dimension");
  }
  return query_impl(flat);
}

std::uint32_t CubesTable::value_at(const AffineFlat& flat,
                                   std::span<const std::uint32_t> point) const {
  auto local = flat.local_point(point);
  if (!local) throw std::invalid_argument("point not on the queried flat");
  return query(flat).evaluate(*local);
}

RngStream CubesTable::flat_stream(const AffineFlat& flat, std::string_view domain) const {
  const std::string enc = flat.encode();
  return keyed_stream(params_.seed, domain,
                      {reinterpret_cast<const std::uint8_t*>(enc.data()), enc.size()});
}

MultiPoly CubesTable::random_local_poly(const AffineFlat& flat, std::string_view domain) const {
  RngStream rng = flat_stream(flat, domain);
  return random_poly(params_.field, params_.k, params_.d, rng);
}

// --- honest ----------------------------------------------------------------

HonestTable::HonestTable(Params params, MultiPoly g)
    : CubesTable(std::move(params)), g_(std::move(g)) {
  params_.field.require_same(g_.field());
  if (g_.nvars() != params_.n) {
    throw std::invalid_argument("encoded polynomial has wrong variable count");
  }
  if (g_.actual_degree() > params_.d) {
    throw std::invalid_argument("encoded polynomial exceeds the degree bound");
  }
}

MultiPoly HonestTable::query_impl(const AffineFlat& flat) const {
  return restrict_to(g_, flat);
}

nlohmann::json HonestTable::descriptor() const {
  return {{"kind", "honest"},   {"q", params_.field.q()}, {"n", params_.n},
          {"d", params_.d},     {"k", params_.k},         {"seed", params_.seed},
          {"g", to_text(g_)}};
}

// --- corrupted ---------------------------------------------------------------

CorruptedTable::CorruptedTable(Params params, MultiPoly g, double rho)
    : CubesTable(std::move(params)), g_(std::move(g)), rho_(rho) {
  params_.field.require_same(g_.field());
  if (g_.nvars() != params_.n) {
    throw std::invalid_argument("encoded polynomial has wrong variable count");
  }
  if (g_.actual_degree() > params_.d) {
    throw std::invalid_argument("encoded polynomial exceeds the degree bound");
  }
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("corruption rate must lie in [0, 1]");
  }
}

MultiPoly CorruptedTable::query_impl(const AffineFlat& flat) const {
  RngStream coin = flat_stream(flat, "corrupt-coin");
  if (coin.bernoulli(rho_)) return random_local_poly(flat, "corrupt-entry");
  return restrict_to(g_, flat);
}

nlohmann::json CorruptedTable::descriptor() const {
  return {{"kind", "corrupted"}, {"q", params_.field.q()}, {"n", params_.n},
          {"d", params_.d},      {"k", params_.k},         {"seed", params_.seed},
          {"g", to_text(g_)},    {"rho", rho_}};
}

// --- planted -----------------------------------------------------------------

PlantedSpec PlantedSpec::sample(const Field& f, int n, int d, double c, std::uint64_t seed) {
  const double q3 = std::pow(static_cast<double>(f.q()), 3.0);
  long long h = std::llround(c * q3);
  if (h < 1) h = 1;
  PlantedSpec spec;
  spec.c = c;
  RngStream rng(derive_seed(seed, "planted-setup"), 0);
  for (long long i = 0; i < h; ++i) {
    spec.hyperplanes.push_back(sample_flat(f, n, n - 1, rng));
    spec.hidden.push_back(random_poly(f, n - 1, d, rng));
  }
  return spec;
}

PlantedTable::PlantedTable(Params params, PlantedSpec spec)
    : CubesTable(std::move(params)), spec_(std::move(spec)) {
  if (spec_.hyperplanes.empty()) {
    throw std::invalid_argument("planted table needs at least one hyperplane");
  }
  if (spec_.hyperplanes.size() != spec_.hidden.size()) {
    throw std::invalid_argument("hyperplane and hidden polynomial counts differ");
  }
  const Field& f = params_.field;
  for (std::size_t i = 0; i < spec_.hyperplanes.size(); ++i) {
    const AffineFlat& w = spec_.hyperplanes[i];
    f.require_same(w.field());
    if (w.ambient_dim() != params_.n || w.dim() != params_.n - 1) {
      throw std::invalid_argument("planted hyperplane has wrong dimensions");
    }
    const MultiPoly& h = spec_.hidden[i];
    f.require_same(h.field());
    if (h.nvars() != params_.n - 1 || h.actual_degree() > params_.d) {
      throw std::invalid_argument("hidden polynomial has wrong shape");
    }
    // One linear functional cuts out the hyperplane.
    Mat b(w.dim(), params_.n);
    for (int r = 0; r < w.dim(); ++r) {
      auto row = w.basis_row(r);
      for (int cidx = 0; cidx < params_.n; ++cidx) b.at(r, cidx) = row[cidx];
    }
    auto ker = kernel(f, std::move(b));
    if (ker.size() != 1) throw std::logic_error("hyperplane kernel is not one dimensional");
    std::uint32_t offset = 0;
    for (int j = 0; j < params_.n; ++j) offset = f.add(offset, f.mul(ker[0][j], w.base()[j]));
    normals_.push_back(std::move(ker[0]));
    offsets_.push_back(offset);
  }
}

int PlantedTable::covering_index(const AffineFlat& flat) const {
  const Field& f = params_.field;
  const int n = params_.n;
  for (std::size_t i = 0; i < normals_.size(); ++i) {
    const std::uint32_t* a = normals_[i].data();
    std::uint32_t dot = 0;
    for (int j = 0; j < n; ++j) dot = f.add(dot, f.mul(a[j], flat.base()[j]));
    if (dot != offsets_[i]) continue;
    bool inside = true;
    for (int r = 0; r < flat.dim() && inside; ++r) {
      auto row = flat.basis_row(r);
      std::uint32_t rd = 0;
      for (int j = 0; j < n; ++j) rd = f.add(rd, f.mul(a[j], row[j]));
      inside = rd == 0;
    }
    if (inside) return static_cast<int>(i);
  }
  return -1;
}

MultiPoly PlantedTable::query_impl(const AffineFlat& flat) const {
  const int i = covering_index(flat);
  if (i < 0) return random_local_poly(flat, "planted-entry");
  return restrict_to(spec_.hidden[i], localize_map(spec_.hyperplanes[i], flat));
}

nlohmann::json PlantedTable::descriptor() const {
  nlohmann::json planes = nlohmann::json::array();
  nlohmann::json hidden = nlohmann::json::array();
  for (const auto& w : spec_.hyperplanes) planes.push_back(flat_to_json(w));
  for (const auto& h : spec_.hidden) hidden.push_back(to_text(h));
  return {{"kind", "planted"},  {"q", params_.field.q()}, {"n", params_.n},
          {"d", params_.d},     {"k", params_.k},         {"seed", params_.seed},
          {"c", spec_.c},       {"h", spec_.hyperplanes.size()},
          {"hyperplanes", planes}, {"hidden", hidden}};
}

// --- explicit ------------------------------------------------------------------

ExplicitTable::ExplicitTable(Params params) : CubesTable(std::move(params)) {}

void ExplicitTable::set_entry(const AffineFlat& flat, MultiPoly entry) {
  params_.field.require_same(flat.field());
  if (flat.ambient_dim() != params_.n || flat.dim() != params_.k) {
    throw std::invalid_argument("entry flat has wrong dimensions");
  }
  if (entry.nvars() != params_.k || entry.actual_degree() > params_.d) {
    throw std::invalid_argument("entry polynomial has wrong shape");
  }
  entries_.insert_or_assign(flat.encode(), std::move(entry));
}

MultiPoly ExplicitTable::query_impl(const AffineFlat& flat) const {
  auto it = entries_.find(flat.encode());
  if (it == entries_.end()) throw std::out_of_range("no entry for the queried flat");
  return it->second;
}

nlohmann::json ExplicitTable::descriptor() const {
  nlohmann::json entries = nlohmann::json::array();
  const Field& f = params_.field;
  for (const auto& [enc, poly] : entries_) {
    // Decode the canonical byte key back into base/basis words.
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(enc.data());
    auto word = [&](std::size_t i) {
      std::uint64_t v = 0;
      for (int b = 7; b >= 0; --b) v = (v << 8) | bytes[8 * i + b];
      return v;
    };
    const int n = static_cast<int>(word(0));
    const int k = static_cast<int>(word(1));
    std::vector<std::vector<std::uint32_t>> basis(k, std::vector<std::uint32_t>(n));
    std::size_t at = 2;
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < n; ++c) basis[r][c] = static_cast<std::uint32_t>(word(at++));
    }
    std::vector<std::uint32_t> base(n);
    for (int c = 0; c < n; ++c) base[c] = static_cast<std::uint32_t>(word(at++));
    AffineFlat flat = AffineFlat::canonicalize(f, base, basis);
    entries.push_back({{"flat", flat_to_json(flat)}, {"poly", to_text(poly)}});
  }
  return {{"kind", "explicit"}, {"q", params_.field.q()}, {"n", params_.n},
          {"d", params_.d},     {"k", params_.k},         {"seed", params_.seed},
          {"entries", entries}};
}

// --- descriptors -----------------------------------------------------------------

nlohmann::json flat_to_json(const AffineFlat& flat) {
  nlohmann::json basis = nlohmann::json::array();
  for (int r = 0; r < flat.dim(); ++r) {
    auto row = flat.basis_row(r);
    basis.push_back(std::vector<std::uint32_t>(row.begin(), row.end()));
  }
  return {{"base", std::vector<std::uint32_t>(flat.base().begin(), flat.base().end())},
          {"basis", basis}};
}

AffineFlat flat_from_json(const Field& f, const nlohmann::json& j) {
  std::vector<std::uint32_t> base = j.at("base").get<std::vector<std::uint32_t>>();
  std::vector<std::vector<std::uint32_t>> basis;
  for (const auto& row : j.at("basis")) {
    basis.push_back(row.get<std::vector<std::uint32_t>>());
  }
  return AffineFlat::canonicalize(f, base, basis);
}

std::unique_ptr<CubesTable> table_from_descriptor(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  Field f(j.at("q").get<std::uint32_t>());
  CubesTable::Params params{f, j.at("n").get<int>(), j.at("d").get<int>(),
                            j.at("k").get<int>(), j.at("seed").get<std::uint64_t>()};
  if (kind == "honest") {
    return std::make_unique<HonestTable>(params, from_text(j.at("g").get<std::string>()));
  }
  if (kind == "corrupted") {
    return std::make_unique<CorruptedTable>(params, from_text(j.at("g").get<std::string>()),
                                            j.at("rho").get<double>());
  }
  if (kind == "planted") {
    PlantedSpec spec;
    spec.c = j.at("c").get<double>();
    for (const auto& w : j.at("hyperplanes")) spec.hyperplanes.push_back(flat_from_json(f, w));
    for (const auto& h : j.at("hidden")) spec.hidden.push_back(from_text(h.get<std::string>()));
    return std::make_unique<PlantedTable>(params, std::move(spec));
  }
  if (kind == "explicit") {
    auto table = std::make_unique<ExplicitTable>(params);
    for (const auto& entry : j.at("entries")) {
      table->set_entry(flat_from_json(f, entry.at("flat")),
                       from_text(entry.at("poly").get<std::string>()));
    }
    return table;
  }
  throw std::invalid_argument("unknown table kind: " + kind);
}

Estimate table_agreement(const CubesTable& table, const MultiPoly& g,
                         std::uint64_t trials, std::uint64_t seed, int threads) {
  table.field().require_same(g.field());
  if (g.nvars() != table.n()) throw std::invalid_argument("polynomial has wrong variable count");
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  const Field f = table.field();
  const int n = table.n();
  const int k = table.k();
  return run_trials(
      trials, derive_seed(seed, "table-agreement"),
      [&](std::uint64_t, RngStream& rng) {
        AffineFlat c = sample_flat(f, n, k, rng);
        return table.query(c) == restrict_to(g, c);
      },
      threads);
}

}  // namespace ldt
