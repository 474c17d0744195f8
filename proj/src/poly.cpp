#include "ldt/poly.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace ldt {

namespace {

void gen_exponents(int nvars, int degree, std::vector<std::uint8_t>& cur, int pos,
                   int left, std::vector<std::vector<std::uint8_t>>& out) {
  if (pos == nvars) {
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= left; ++e) {
    cur[pos] = static_cast<std::uint8_t>(e);
    gen_exponents(nvars, degree, cur, pos + 1, left - e, out);
  }
  cur[pos] = 0;
}

int vec_degree(const std::vector<std::uint8_t>& e) {
  int s = 0;
  for (auto v : e) s += v;
  return s;
}

}  // namespace

MonomialTable::MonomialTable(int nvars, int degree) : nvars_(nvars), degree_(degree) {
  if (nvars < 1) throw std::invalid_argument("polynomials need at least one variable");
  if (degree < 0) throw std::invalid_argument("degree bound must be nonnegative");
  std::vector<std::uint8_t> cur(nvars, 0);
  gen_exponents(nvars, degree, cur, 0, degree, exps_);
  std::sort(exps_.begin(), exps_.end(),
            [](const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
              const int da = vec_degree(a), db = vec_degree(b);
              if (da != db) return da < db;
              return a > b;  // within a degree, x1-heavy monomials first
            });
  degrees_.reserve(exps_.size());
  for (const auto& e : exps_) degrees_.push_back(vec_degree(e));

  const int m = count();
  products_.assign(static_cast<std::size_t>(m) * m, -1);
  std::map<std::vector<std::uint8_t>, int> lookup;
  for (int i = 0; i < m; ++i) lookup[exps_[i]] = i;
  std::vector<std::uint8_t> sum(nvars);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (degrees_[i] + degrees_[j] > degree) continue;
      for (int v = 0; v < nvars; ++v) sum[v] = static_cast<std::uint8_t>(exps_[i][v] + exps_[j][v]);
      products_[static_cast<std::size_t>(i) * m + j] = lookup.at({sum.begin(), sum.end()});
    }
  }
}

std::shared_ptr<const MonomialTable> MonomialTable::get(int nvars, int degree) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(nvars, degree);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto table = std::shared_ptr<const MonomialTable>(new MonomialTable(nvars, degree));
  cache.emplace(key, table);
  return table;
}

int MonomialTable::index_of(std::span<const std::uint8_t> exps) const {
  if (static_cast<int>(exps.size()) != nvars_) {
    throw std::invalid_argument("exponent vector has wrong length");
  }
  int deg = 0;
  for (auto e : exps) deg += e;
  if (deg > degree_) return -1;
  // Tables are small; linear scan within the degree band.
  for (int i = 0; i < count(); ++i) {
    if (degrees_[i] != deg) continue;
    if (std::equal(exps.begin(), exps.end(), exps_[i].begin())) return i;
  }
  return -1;
}

MultiPoly::MultiPoly(const Field& f, int nvars, int degree_bound)
    : field_(f), table_(MonomialTable::get(nvars, degree_bound)),
      coeffs_(table_->count(), 0) {}

std::uint32_t MultiPoly::coeff_of(std::span<const std::uint8_t> exps) const {
  const int idx = table_->index_of(exps);
  return idx < 0 ? 0 : coeffs_[idx];
}

void MultiPoly::set_coeff_of(std::span<const std::uint8_t> exps, std::uint32_t v) {
  const int idx = table_->index_of(exps);
  if (idx < 0) throw std::invalid_argument("monomial exceeds the degree bound");
  coeffs_[idx] = v % field_.q();
}

std::uint32_t MultiPoly::evaluate(std::span<const std::uint32_t> point) const {
  const int m = nvars();
  if (static_cast<int>(point.size()) != m) {
    throw std::invalid_argument("evaluation point has wrong length");
  }
  const int d = degree_bound();
  // Power table point[i]^e for e <= d.
  std::vector<std::uint32_t> pw(static_cast<std::size_t>(m) * (d + 1));
  for (int i = 0; i < m; ++i) {
    pw[static_cast<std::size_t>(i) * (d + 1)] = 1 % field_.q();
    for (int e = 1; e <= d; ++e) {
      pw[static_cast<std::size_t>(i) * (d + 1) + e] =
          field_.mul(pw[static_cast<std::size_t>(i) * (d + 1) + e - 1], point[i]);
    }
  }
  std::uint32_t acc = 0;
  for (int idx = 0; idx < table_->count(); ++idx) {
    const std::uint32_t c = coeffs_[idx];
    if (c == 0) continue;
    std::uint32_t term = c;
    auto exps = table_->exponents(idx);
    for (int i = 0; i < m; ++i) {
      const int e = exps[i];
      if (e) term = field_.mul(term, pw[static_cast<std::size_t>(i) * (d + 1) + e]);
    }
    acc = field_.add(acc, term);
  }
  return acc;
}

int MultiPoly::actual_degree() const {
  int deg = 0;
  for (int idx = 0; idx < table_->count(); ++idx) {
    if (coeffs_[idx] != 0) deg = std::max(deg, table_->total_degree(idx));
  }
  return deg;
}

bool MultiPoly::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](std::uint32_t c) { return c == 0; });
}

bool MultiPoly::operator==(const MultiPoly& other) const {
  if (field_.q() != other.field_.q() || nvars() != other.nvars()) return false;
  // Lower-bound monomials are a prefix of higher-bound ones.
  const auto& shorter = coeffs_.size() <= other.coeffs_.size() ? coeffs_ : other.coeffs_;
  const auto& longer = coeffs_.size() <= other.coeffs_.size() ? other.coeffs_ : coeffs_;
  if (!std::equal(shorter.begin(), shorter.end(), longer.begin())) return false;
  return std::all_of(longer.begin() + shorter.size(), longer.end(),
                     [](std::uint32_t c) { return c == 0; });
}

MultiPoly add(const MultiPoly& a, const MultiPoly& b) {
  a.field().require_same(b.field());
  if (a.nvars() != b.nvars()) throw std::invalid_argument("variable count mismatch");
  MultiPoly out(a.field(), a.nvars(), std::max(a.degree_bound(), b.degree_bound()));
  for (int i = 0; i < a.table().count(); ++i) out.set_coeff(i, a.coeff(i));
  for (int i = 0; i < b.table().count(); ++i) {
    out.set_coeff(i, a.field().add(out.coeff(i), b.coeff(i)));
  }
  return out;
}

MultiPoly sub(const MultiPoly& a, const MultiPoly& b) {
  a.field().require_same(b.field());
  if (a.nvars() != b.nvars()) throw std::invalid_argument("variable count mismatch");
  MultiPoly out(a.field(), a.nvars(), std::max(a.degree_bound(), b.degree_bound()));
  for (int i = 0; i < a.table().count(); ++i) out.set_coeff(i, a.coeff(i));
  for (int i = 0; i < b.table().count(); ++i) {
    out.set_coeff(i, a.field().sub(out.coeff(i), b.coeff(i)));
  }
  return out;
}

MultiPoly mul(const MultiPoly& a, const MultiPoly& b) {
  a.field().require_same(b.field());
  if (a.nvars() != b.nvars()) throw std::invalid_argument("variable count mismatch");
  const Field& f = a.field();
  MultiPoly out(f, a.nvars(), a.degree_bound() + b.degree_bound());
  const MonomialTable& t = out.table();
  for (int i = 0; i < a.table().count(); ++i) {
    const std::uint32_t ca = a.coeff(i);
    if (ca == 0) continue;
    const int oi = t.index_of(a.table().exponents(i));
    for (int j = 0; j < b.table().count(); ++j) {
      const std::uint32_t cb = b.coeff(j);
      if (cb == 0) continue;
      const int oj = t.index_of(b.table().exponents(j));
      const int k = t.product_index(oi, oj);
      out.set_coeff(k, f.add(out.coeff(k), f.mul(ca, cb)));
    }
  }
  return out;
}

namespace {

// Coefficient-vector product within one table; degrees must stay in bound,
// which restriction guarantees because each substituted factor is linear.
void mul_into(const Field& f, const MonomialTable& t,
              const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
              std::vector<std::uint32_t>& out) {
  std::fill(out.begin(), out.end(), 0);
  const int m = t.count();
  for (int i = 0; i < m; ++i) {
    const std::uint32_t ca = a[i];
    if (ca == 0) continue;
    for (int j = 0; j < m; ++j) {
      const std::uint32_t cb = b[j];
      if (cb == 0) continue;
      const int k = t.product_index(i, j);
      out[k] = f.add(out[k], f.mul(ca, cb));
    }
  }
}

}  // namespace

MultiPoly restrict_to(const MultiPoly& p, const AffineMap& map) {
  if (map.out_dim != p.nvars()) {
    throw std::invalid_argument("affine map range does not match polynomial variables");
  }
  if (map.in_dim < 1) {
    throw std::invalid_argument("restriction target needs at least one parameter");
  }
  const Field& f = p.field();
  const int m = p.nvars();
  const int k = map.in_dim;
  const int d = p.degree_bound();
  MultiPoly out(f, k, d);
  auto table = MonomialTable::get(k, d);
  const int mk = table->count();
  if (d == 0) {
    out.set_coeff(0, p.coeff(0));
    return out;
  }

  // In graded-lex order the constant monomial is index 0 and t_j is index j.
  // Linear form per ambient variable: L_i = base_i + sum_j rows[j][i] t_j.
  // Powers L_i^e are precomputed up to the bound.
  std::vector<std::vector<std::vector<std::uint32_t>>> powers(m);
  std::vector<std::uint32_t> one(mk, 0);
  one[0] = 1 % f.q();
  for (int i = 0; i < m; ++i) {
    std::vector<std::uint32_t> lin(mk, 0);
    lin[0] = map.base[i];
    for (int j = 0; j < k; ++j) lin[1 + j] = map.rows[static_cast<std::size_t>(j) * m + i];
    powers[i].push_back(one);
    powers[i].push_back(std::move(lin));
    for (int e = 2; e <= d; ++e) {
      std::vector<std::uint32_t> next(mk, 0);
      mul_into(f, *table, powers[i][e - 1], powers[i][1], next);
      powers[i].push_back(std::move(next));
    }
  }

  std::vector<std::uint32_t> acc(mk), tmp(mk), result(mk, 0);
  for (int idx = 0; idx < p.table().count(); ++idx) {
    const std::uint32_t c = p.coeff(idx);
    if (c == 0) continue;
    auto exps = p.table().exponents(idx);
    acc = one;
    for (int i = 0; i < m; ++i) {
      const int e = exps[i];
      if (e == 0) continue;
      mul_into(f, *table, acc, powers[i][e], tmp);
      std::swap(acc, tmp);
    }
    for (int j = 0; j < mk; ++j) result[j] = f.add(result[j], f.mul(c, acc[j]));
  }
  for (int j = 0; j < mk; ++j) out.set_coeff(j, result[j]);
  return out;
}

MultiPoly restrict_to(const MultiPoly& p, const AffineFlat& flat) {
  p.field().require_same(flat.field());
  if (flat.ambient_dim() != p.nvars()) {
    throw std::invalid_argument("flat lives in a different ambient space");
  }
  return restrict_to(p, flat.as_map());
}

InterpolationResult interpolate(const Field& f, int nvars, int degree,
                                const std::vector<std::vector<std::uint32_t>>& points,
                                const std::vector<std::uint32_t>& values) {
  if (points.size() != values.size()) {
    throw std::invalid_argument("points and values differ in length");
  }
  auto table = MonomialTable::get(nvars, degree);
  const int m = table->count();
  Mat aug(static_cast<int>(points.size()), m + 1);
  std::vector<std::uint32_t> pw;
  for (std::size_t r = 0; r < points.size(); ++r) {
    const auto& pt = points[r];
    if (static_cast<int>(pt.size()) != nvars) {
      throw std::invalid_argument("sample point has wrong length");
    }
    pw.assign(static_cast<std::size_t>(nvars) * (degree + 1), 0);
    for (int i = 0; i < nvars; ++i) {
      pw[static_cast<std::size_t>(i) * (degree + 1)] = 1 % f.q();
      for (int e = 1; e <= degree; ++e) {
        pw[static_cast<std::size_t>(i) * (degree + 1) + e] =
            f.mul(pw[static_cast<std::size_t>(i) * (degree + 1) + e - 1], pt[i] % f.q());
      }
    }
    for (int c = 0; c < m; ++c) {
      auto exps = table->exponents(c);
      std::uint32_t v = 1 % f.q();
      for (int i = 0; i < nvars; ++i) {
        if (exps[i]) v = f.mul(v, pw[static_cast<std::size_t>(i) * (degree + 1) + exps[i]]);
      }
      aug.at(static_cast<int>(r), c) = v;
    }
    aug.at(static_cast<int>(r), m) = values[r] % f.q();
  }

  std::vector<int> pivots = rref(f, aug);
  for (int p : pivots) {
    if (p == m) return {FitStatus::kInconsistent, std::nullopt};
  }
  if (static_cast<int>(pivots.size()) < m) {
    return {FitStatus::kUnderdetermined, std::nullopt};
  }
  MultiPoly poly(f, nvars, degree);
  for (int i = 0; i < m; ++i) poly.set_coeff(pivots[i] /* == i */, aug.at(i, m));
  return {FitStatus::kOk, std::move(poly)};
}

InterpolationResult interpolate_cube(const Field& f, int degree,
                                     const std::vector<std::vector<std::uint32_t>>& points,
                                     const std::vector<std::uint32_t>& values) {
  if (degree + 1 > static_cast<int>(f.q())) {
    throw std::invalid_argument("interpolation requires degree + 1 <= q");
  }
  return interpolate(f, 3, degree, points, values);
}

Agreement fraction_agreement(const MultiPoly& a, const MultiPoly& b,
                             const AgreementOptions& options) {
  a.field().require_same(b.field());
  if (a.nvars() != b.nvars()) throw std::invalid_argument("variable count mismatch");
  const Field& f = a.field();
  const int m = a.nvars();

  // Domain size q^m, saturating above the cap.
  std::uint64_t domain = 1;
  bool exhaustive = true;
  for (int i = 0; i < m; ++i) {
    if (domain > options.exhaustive_cap / f.q()) {
      exhaustive = false;
      break;
    }
    domain *= f.q();
  }
  if (exhaustive && domain > options.exhaustive_cap) exhaustive = false;

  Agreement result;
  if (exhaustive) {
    std::vector<std::uint32_t> pt(m, 0);
    result.total = domain;
    while (true) {
      if (a.evaluate(pt) == b.evaluate(pt)) ++result.agree;
      int i = 0;
      while (i < m && ++pt[i] == f.q()) pt[i++] = 0;
      if (i == m) break;
    }
    result.exact = true;
  } else {
    RngStream rng(derive_seed(options.seed, "fraction-agreement"), 0);
    result.total = options.trials;
    for (std::uint64_t t = 0; t < options.trials; ++t) {
      std::vector<std::uint32_t> pt = rng.point(f, m);
      if (a.evaluate(pt) == b.evaluate(pt)) ++result.agree;
    }
    result.exact = false;
  }
  return result;
}

MultiPoly random_poly(const Field& f, int nvars, int degree, RngStream& rng) {
  MultiPoly p(f, nvars, degree);
  for (int i = 0; i < p.table().count(); ++i) p.set_coeff(i, rng.field_element(f));
  return p;
}

std::string to_text(const MultiPoly& p) {
  std::ostringstream out;
  out << "q " << p.field().q() << "\n";
  out << "m " << p.nvars() << "\n";
  out << "d " << p.degree_bound() << "\n";
  for (int i = 0; i < p.table().count(); ++i) {
    if (p.coeff(i) == 0) continue;
    out << "term";
    for (auto e : p.table().exponents(i)) out << ' ' << static_cast<int>(e);
    out << ' ' << p.coeff(i) << "\n";
  }
  return out.str();
}

MultiPoly from_text(const std::string& text) {
  std::istringstream in(text);
  std::string key;
  std::uint32_t q = 0;
  int m = -1, d = -1;
  if (!(in >> key) || key != "q" || !(in >> q)) throw std::invalid_argument("bad polynomial record: q");
  if (!(in >> key) || key != "m" || !(in >> m)) throw std::invalid_argument("bad polynomial record: m");
  if (!(in >> key) || key != "d" || !(in >> d)) throw std::invalid_argument("bad polynomial record: d");
  Field f(q);
  MultiPoly p(f, m, d);
  while (in >> key) {
    if (key != "term") throw std::invalid_argument("bad polynomial record: expected term");
    std::vector<std::uint8_t> exps(m);
    for (int i = 0; i < m; ++i) {
      int e;
      if (!(in >> e) || e < 0) throw std::invalid_argument("bad polynomial record: exponent");
      exps[i] = static_cast<std::uint8_t>(e);
    }
    std::uint32_t c;
    if (!(in >> c)) throw std::invalid_argument("bad polynomial record: coefficient");
    p.set_coeff_of(exps, c);
  }
  return p;
}

}  // namespace ldt
