#include "ldt/geometry.hpp"

#include <algorithm>
#include <stdexcept>

#include "ldt/errors.hpp"

namespace ldt {

namespace {

using u128 = unsigned __int128;

constexpr std::uint64_t kCountLimit = 1ull << 63;

std::uint64_t checked_u64(u128 v) {
  if (v >= kCountLimit) throw ResourceCapError("flat count overflows 2^63");
  return static_cast<std::uint64_t>(v);
}

void append_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

std::vector<std::uint32_t> AffineMap::apply(const Field& f,
                                            std::span<const std::uint32_t> t) const {
  if (static_cast<int>(t.size()) != in_dim) {
    throw std::invalid_argument("affine map applied to wrong-length tuple");
  }
  std::vector<std::uint32_t> out(base.begin(), base.end());
  for (int i = 0; i < in_dim; ++i) {
    const std::uint32_t c = t[i];
    if (c == 0) continue;
    const std::uint32_t* row = rows.data() + static_cast<std::size_t>(i) * out_dim;
    for (int j = 0; j < out_dim; ++j) out[j] = f.add(out[j], f.mul(c, row[j]));
  }
  return out;
}

AffineFlat AffineFlat::canonicalize(const Field& f,
                                    std::span<const std::uint32_t> base,
                                    const std::vector<std::vector<std::uint32_t>>& spanning) {
  const int n = static_cast<int>(base.size());
  if (n <= 0) throw std::invalid_argument("ambient dimension must be positive");
  Mat m(static_cast<int>(spanning.size()), n);
  for (std::size_t r = 0; r < spanning.size(); ++r) {
    if (static_cast<int>(spanning[r].size()) != n) {
      throw std::invalid_argument("spanning vector has wrong length");
    }
    for (int c = 0; c < n; ++c) m.at(static_cast<int>(r), c) = spanning[r][c] % f.q();
  }
  std::vector<int> pivots = rref(f, m);
  const int k = static_cast<int>(pivots.size());

  AffineFlat flat(f, n, k);
  flat.pivots_ = pivots;
  flat.basis_.assign(static_cast<std::size_t>(k) * n, 0);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < n; ++c) flat.basis_[static_cast<std::size_t>(r) * n + c] = m.at(r, c);
  }
  // Unique coset representative: clear the pivot coordinates of the base.
  flat.base_.assign(base.begin(), base.end());
  for (auto& v : flat.base_) v %= f.q();
  for (int r = 0; r < k; ++r) {
    const std::uint32_t c = flat.base_[pivots[r]];
    if (c == 0) continue;
    for (int j = 0; j < n; ++j) {
      flat.base_[j] = f.sub(flat.base_[j], f.mul(c, flat.basis_[static_cast<std::size_t>(r) * n + j]));
    }
  }
  return flat;
}

AffineFlat AffineFlat::from_point(const Field& f, std::span<const std::uint32_t> p) {
  return canonicalize(f, p, {});
}

AffineFlat AffineFlat::whole_space(const Field& f, int n) {
  std::vector<std::vector<std::uint32_t>> id(n, std::vector<std::uint32_t>(n, 0));
  for (int i = 0; i < n; ++i) id[i][i] = 1;
  std::vector<std::uint32_t> zero(n, 0);
  return canonicalize(f, zero, id);
}

std::vector<std::uint32_t> AffineFlat::embed(std::span<const std::uint32_t> t) const {
  if (static_cast<int>(t.size()) != k_) {
    throw std::invalid_argument("local tuple has wrong length");
  }
  std::vector<std::uint32_t> p(base_);
  for (int i = 0; i < k_; ++i) {
    const std::uint32_t c = t[i];
    if (c == 0) continue;
    const std::uint32_t* row = basis_.data() + static_cast<std::size_t>(i) * n_;
    for (int j = 0; j < n_; ++j) p[j] = field_.add(p[j], field_.mul(c, row[j]));
  }
  return p;
}

std::optional<std::vector<std::uint32_t>> AffineFlat::local_point(
    std::span<const std::uint32_t> p) const {
  if (static_cast<int>(p.size()) != n_) {
    throw std::invalid_argument("point has wrong ambient dimension");
  }
  // base_ vanishes on pivot columns, so the coordinates can be read off.
  std::vector<std::uint32_t> t(k_);
  for (int i = 0; i < k_; ++i) t[i] = p[pivots_[i]];
  std::vector<std::uint32_t> q = embed(t);
  for (int j = 0; j < n_; ++j) {
    if (q[j] != p[j]) return std::nullopt;
  }
  return t;
}

std::optional<std::vector<std::uint32_t>> AffineFlat::local_direction(
    std::span<const std::uint32_t> dir) const {
  if (static_cast<int>(dir.size()) != n_) {
    throw std::invalid_argument("direction has wrong ambient dimension");
  }
  std::vector<std::uint32_t> t(k_);
  for (int i = 0; i < k_; ++i) t[i] = dir[pivots_[i]];
  std::vector<std::uint32_t> w(n_, 0);
  for (int i = 0; i < k_; ++i) {
    const std::uint32_t c = t[i];
    if (c == 0) continue;
    const std::uint32_t* row = basis_.data() + static_cast<std::size_t>(i) * n_;
    for (int j = 0; j < n_; ++j) w[j] = field_.add(w[j], field_.mul(c, row[j]));
  }
  for (int j = 0; j < n_; ++j) {
    if (w[j] != dir[j]) return std::nullopt;
  }
  return t;
}

bool AffineFlat::contains_point(std::span<const std::uint32_t> p) const {
  return local_point(p).has_value();
}

bool AffineFlat::contains_flat(const AffineFlat& other) const {
  field_.require_same(other.field_);
  if (other.n_ != n_) throw std::invalid_argument("ambient dimension mismatch");
  if (other.k_ > k_) return false;
  if (!contains_point(other.base_)) return false;
  for (int i = 0; i < other.k_; ++i) {
    if (!local_direction(other.basis_row(i)).has_value()) return false;
  }
  return true;
}

AffineMap AffineFlat::as_map() const {
  AffineMap m;
  m.in_dim = k_;
  m.out_dim = n_;
  m.base = base_;
  m.rows = basis_;
  return m;
}

std::string AffineFlat::encode() const {
  std::string out;
  out.reserve(static_cast<std::size_t>(2 + k_ * n_ + n_) * 8);
  append_u64_le(out, static_cast<std::uint64_t>(n_));
  append_u64_le(out, static_cast<std::uint64_t>(k_));
  for (std::uint32_t v : basis_) append_u64_le(out, v);
  for (std::uint32_t v : base_) append_u64_le(out, v);
  return out;
}

bool AffineFlat::operator==(const AffineFlat& other) const {
  return field_.q() == other.field_.q() && n_ == other.n_ && k_ == other.k_ &&
         basis_ == other.basis_ && base_ == other.base_;
}

AffineMap localize_map(const AffineFlat& outer, const AffineFlat& inner) {
  auto base = outer.local_point(inner.base());
  if (!base) throw std::invalid_argument("inner flat not contained in outer flat");
  AffineMap m;
  m.in_dim = inner.dim();
  m.out_dim = outer.dim();
  m.base = std::move(*base);
  m.rows.resize(static_cast<std::size_t>(m.in_dim) * m.out_dim);
  for (int i = 0; i < inner.dim(); ++i) {
    auto dir = outer.local_direction(inner.basis_row(i));
    if (!dir) throw std::invalid_argument("inner flat not contained in outer flat");
    std::copy(dir->begin(), dir->end(), m.rows.begin() + static_cast<std::size_t>(i) * m.out_dim);
  }
  return m;
}

std::optional<AffineFlat> intersect(const AffineFlat& a, const AffineFlat& b) {
  a.field().require_same(b.field());
  if (a.ambient_dim() != b.ambient_dim()) {
    throw std::invalid_argument("ambient dimension mismatch");
  }
  const Field& f = a.field();
  const int n = a.ambient_dim();
  const int ka = a.dim(), kb = b.dim();

  // Common point: solve t*A - s*B = b.base - a.base as a column system.
  Mat m(n, ka + kb);
  for (int c = 0; c < n; ++c) {
    for (int i = 0; i < ka; ++i) m.at(c, i) = a.basis_row(i)[c];
    for (int j = 0; j < kb; ++j) m.at(c, ka + j) = f.neg(b.basis_row(j)[c]);
  }
  std::vector<std::uint32_t> rhs(n);
  for (int c = 0; c < n; ++c) rhs[c] = f.sub(b.base()[c], a.base()[c]);
  auto sol = solve(f, m, rhs);
  if (!sol) return std::nullopt;
  std::vector<std::uint32_t> t(sol->begin(), sol->begin() + ka);
  std::vector<std::uint32_t> p0 = a.embed(t);

  // Direction space: common directions w = u*A = v*B come from the kernel.
  std::vector<std::vector<std::uint32_t>> dirs;
  for (const auto& z : kernel(f, m)) {
    std::vector<std::uint32_t> w(n, 0);
    for (int i = 0; i < ka; ++i) {
      const std::uint32_t c = z[i];
      if (c == 0) continue;
      auto row = a.basis_row(i);
      for (int j = 0; j < n; ++j) w[j] = f.add(w[j], f.mul(c, row[j]));
    }
    dirs.push_back(std::move(w));
  }
  return AffineFlat::canonicalize(f, p0, dirs);
}

namespace {

struct LocalTarget {
  int dim;
  std::optional<std::vector<std::uint32_t>> anchor;
  std::vector<std::vector<std::uint32_t>> hull;
};

// Collects the constraint hull in the effective coordinate space.
LocalTarget build_target(const Field& f, int n, int k,
                         const FlatConstraints& constraints) {
  const AffineFlat* within = constraints.within ? &*constraints.within : nullptr;
  if (within) {
    within->field().require_same(f);
    if (within->ambient_dim() != n) {
      throw std::invalid_argument("within flat has wrong ambient dimension");
    }
  }
  LocalTarget target;
  target.dim = within ? within->dim() : n;
  if (k < 0 || k > target.dim) {
    throw std::invalid_argument("flat dimension out of range");
  }

  auto to_local_point = [&](std::span<const std::uint32_t> p) {
    if (!within) return std::vector<std::uint32_t>(p.begin(), p.end());
    auto loc = within->local_point(p);
    if (!loc) throw std::invalid_argument("constraint not inside the ambient flat");
    return *loc;
  };
  auto to_local_dir = [&](std::span<const std::uint32_t> d) {
    if (!within) return std::vector<std::uint32_t>(d.begin(), d.end());
    auto loc = within->local_direction(d);
    if (!loc) throw std::invalid_argument("constraint not inside the ambient flat");
    return *loc;
  };
  auto add_point = [&](std::vector<std::uint32_t> p) {
    if (!target.anchor) {
      target.anchor = std::move(p);
      return;
    }
    std::vector<std::uint32_t> diff(target.dim);
    for (int i = 0; i < target.dim; ++i) diff[i] = f.sub(p[i], (*target.anchor)[i]);
    target.hull.push_back(std::move(diff));
  };

  for (const AffineFlat& fl : constraints.contain) {
    fl.field().require_same(f);
    if (fl.ambient_dim() != n) {
      throw std::invalid_argument("constraint flat has wrong ambient dimension");
    }
    add_point(to_local_point(fl.base()));
    for (int i = 0; i < fl.dim(); ++i) target.hull.push_back(to_local_dir(fl.basis_row(i)));
  }
  for (const auto& p : constraints.contain_points) {
    if (static_cast<int>(p.size()) != n) {
      throw std::invalid_argument("constraint point has wrong ambient dimension");
    }
    add_point(to_local_point(p));
  }

  // Reduce the hull once so the rank bookkeeping below starts clean.
  if (!target.hull.empty()) {
    Mat m(static_cast<int>(target.hull.size()), target.dim);
    for (std::size_t r = 0; r < target.hull.size(); ++r) {
      for (int c = 0; c < target.dim; ++c) m.at(static_cast<int>(r), c) = target.hull[r][c];
    }
    std::vector<int> pivots = rref(f, m);
    target.hull.clear();
    for (std::size_t r = 0; r < pivots.size(); ++r) {
      std::vector<std::uint32_t> row(target.dim);
      for (int c = 0; c < target.dim; ++c) row[c] = m.at(static_cast<int>(r), c);
      target.hull.push_back(std::move(row));
    }
  }
  if (static_cast<int>(target.hull.size()) > k) {
    throw std::invalid_argument("constraints span more than the requested dimension");
  }
  return target;
}

}  // namespace

AffineFlat sample_flat(const Field& f, int n, int k, RngStream& rng,
                       const FlatConstraints& constraints) {
  LocalTarget target = build_target(f, n, k, constraints);
  const int dim = target.dim;

  std::vector<std::uint32_t> anchor =
      target.anchor ? *target.anchor : rng.point(f, dim);
  std::vector<std::vector<std::uint32_t>> rows = target.hull;

  Mat reduced(static_cast<int>(rows.size()), dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < dim; ++c) reduced.at(static_cast<int>(r), c) = rows[r][c];
  }
  int current_rank = static_cast<int>(rref(f, reduced).size());

  int guard = 0;
  while (current_rank < k) {
    if (++guard > 100000) {
      throw std::logic_error("sample_flat failed to complete a basis");
    }
    std::vector<std::uint32_t> v = rng.point(f, dim);
    Mat trial(current_rank + 1, dim);
    for (int r = 0; r < current_rank; ++r) {
      for (int c = 0; c < dim; ++c) trial.at(r, c) = reduced.at(r, c);
    }
    for (int c = 0; c < dim; ++c) trial.at(current_rank, c) = v[c];
    if (static_cast<int>(rref(f, trial).size()) != current_rank + 1) continue;
    rows.push_back(std::move(v));
    reduced = std::move(trial);
    ++current_rank;
  }

  if (!constraints.within) {
    return AffineFlat::canonicalize(f, anchor, rows);
  }
  const AffineFlat& w = *constraints.within;
  std::vector<std::uint32_t> gbase = w.embed(anchor);
  std::vector<std::vector<std::uint32_t>> grows;
  grows.reserve(rows.size());
  for (const auto& r : rows) {
    std::vector<std::uint32_t> g(w.ambient_dim(), 0);
    for (int i = 0; i < dim; ++i) {
      const std::uint32_t c = r[i];
      if (c == 0) continue;
      auto row = w.basis_row(i);
      for (int j = 0; j < w.ambient_dim(); ++j) g[j] = f.add(g[j], f.mul(c, row[j]));
    }
    grows.push_back(std::move(g));
  }
  return AffineFlat::canonicalize(f, gbase, grows);
}

FlatPair sample_edge(const Field& f, int n, int k, int ell, RngStream& rng,
                     const FlatConstraints& through) {
  if (!(0 <= ell && ell < k && k <= n)) {
    throw std::invalid_argument("sample_edge requires 0 <= ell < k <= n");
  }
  AffineFlat u = sample_flat(f, n, ell, rng, through);
  FlatConstraints contain_u;
  contain_u.contain.push_back(u);
  AffineFlat v1 = sample_flat(f, n, k, rng, contain_u);
  AffineFlat v2 = sample_flat(f, n, k, rng, contain_u);
  auto common = intersect(v1, v2);
  FlatPair pair{std::move(u), std::move(v1), std::move(v2),
                common ? common->dim() : -1};
  return pair;
}

FlatEnumerator::FlatEnumerator(const Field& f, int n, int k, EnumerateOptions options)
    : field_(f), n_(n), k_(k), options_(std::move(options)) {
  if (options_.within) {
    options_.within->field().require_same(f);
    if (options_.within->ambient_dim() != n) {
      throw std::invalid_argument("within flat has wrong ambient dimension");
    }
    n_ = options_.within->dim();
  }
  if (k_ < 0 || k_ > n_) {
    done_ = true;
    return;
  }
  u128 count = gaussian_binomial(f.q(), n_, k_);
  if (!options_.linear_only) {
    for (int i = 0; i < n_ - k_; ++i) count *= f.q();
  }
  if (count > options_.cap) {
    throw ResourceCapError("flat enumeration exceeds cap");
  }
  pivot_cols_.resize(k_);
  for (int i = 0; i < k_; ++i) pivot_cols_[i] = i;
  load_pivots();
}

void FlatEnumerator::load_pivots() {
  free_cells_.clear();
  std::vector<bool> is_pivot(n_, false);
  for (int c : pivot_cols_) is_pivot[c] = true;
  for (int r = 0; r < k_; ++r) {
    for (int c = pivot_cols_[r] + 1; c < n_; ++c) {
      if (!is_pivot[c]) free_cells_.emplace_back(r, c);
    }
  }
  free_vals_.assign(free_cells_.size(), 0);
  base_cols_.clear();
  if (!options_.linear_only) {
    for (int c = 0; c < n_; ++c) {
      if (!is_pivot[c]) base_cols_.push_back(c);
    }
  }
  base_vals_.assign(base_cols_.size(), 0);
  fresh_pivots_ = true;
}

bool FlatEnumerator::advance_state() {
  // Odometer over the base coordinates, then the free basis entries, then
  // the pivot set.
  const std::uint32_t q = field_.q();
  for (std::size_t i = 0; i < base_vals_.size(); ++i) {
    if (++base_vals_[i] < q) return true;
    base_vals_[i] = 0;
  }
  for (std::size_t i = 0; i < free_vals_.size(); ++i) {
    if (++free_vals_[i] < q) return true;
    free_vals_[i] = 0;
  }
  // Next k-combination of {0..n_-1}.
  int i = k_ - 1;
  while (i >= 0 && pivot_cols_[i] == n_ - k_ + i) --i;
  if (i < 0) return false;
  ++pivot_cols_[i];
  for (int j = i + 1; j < k_; ++j) pivot_cols_[j] = pivot_cols_[j - 1] + 1;
  load_pivots();
  return true;
}

AffineFlat FlatEnumerator::materialize() const {
  AffineFlat flat(field_, n_, k_);
  flat.pivots_ = pivot_cols_;
  flat.basis_.assign(static_cast<std::size_t>(k_) * n_, 0);
  for (int r = 0; r < k_; ++r) {
    flat.basis_[static_cast<std::size_t>(r) * n_ + pivot_cols_[r]] = 1;
  }
  for (std::size_t i = 0; i < free_cells_.size(); ++i) {
    auto [r, c] = free_cells_[i];
    flat.basis_[static_cast<std::size_t>(r) * n_ + c] = free_vals_[i];
  }
  flat.base_.assign(n_, 0);
  for (std::size_t i = 0; i < base_cols_.size(); ++i) {
    flat.base_[base_cols_[i]] = base_vals_[i];
  }
  return flat;
}

std::optional<AffineFlat> FlatEnumerator::next() {
  while (!done_) {
    AffineFlat local = materialize();
    if (!advance_state()) done_ = true;

    AffineFlat flat = [&] {
      if (!options_.within) return local;
      const AffineFlat& w = *options_.within;
      std::vector<std::uint32_t> gbase = w.embed(local.base());
      std::vector<std::vector<std::uint32_t>> grows;
      for (int i = 0; i < local.dim(); ++i) {
        std::vector<std::uint32_t> g(w.ambient_dim(), 0);
        auto lrow = local.basis_row(i);
        for (int j = 0; j < local.ambient_dim(); ++j) {
          const std::uint32_t c = lrow[j];
          if (c == 0) continue;
          auto wrow = w.basis_row(j);
          for (int t = 0; t < w.ambient_dim(); ++t) g[t] = field_.add(g[t], field_.mul(c, wrow[t]));
        }
        grows.push_back(std::move(g));
      }
      return AffineFlat::canonicalize(field_, gbase, grows);
    }();

    if (options_.containing && !flat.contains_flat(*options_.containing)) continue;
    return flat;
  }
  return std::nullopt;
}

std::vector<AffineFlat> enumerate_flats(const Field& f, int n, int k,
                                        EnumerateOptions options) {
  FlatEnumerator it(f, n, k, std::move(options));
  std::vector<AffineFlat> out;
  while (auto flat = it.next()) out.push_back(std::move(*flat));
  return out;
}

std::uint64_t gaussian_binomial(std::uint32_t q, int n, int k) {
  if (k < 0 || k > n) return 0;
  // g(i, j) = g(i-1, j-1) + q^j g(i-1, j)
  std::vector<std::vector<u128>> g(n + 1, std::vector<u128>(k + 1, 0));
  for (int i = 0; i <= n; ++i) g[i][0] = 1;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= std::min(i, k); ++j) {
      u128 qj = 1;
      for (int t = 0; t < j; ++t) {
        qj *= q;
        if (qj >= (u128(1) << 100)) throw ResourceCapError("gaussian binomial overflow");
      }
      g[i][j] = g[i - 1][j - 1] + qj * g[i - 1][j];
      checked_u64(g[i][j]);
    }
  }
  return checked_u64(g[n][k]);
}

std::uint64_t count_affine_flats(std::uint32_t q, int n, int k) {
  u128 count = gaussian_binomial(q, n, k);
  for (int i = 0; i < n - k; ++i) {
    count *= q;
    checked_u64(count);
  }
  return checked_u64(count);
}

}  // namespace ldt
