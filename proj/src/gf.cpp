#include "ldt/gf.hpp"

#include <stdexcept>
#include <string>

namespace ldt {

bool Field::is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  if (n % 3 == 0) return n == 3;
  for (std::uint64_t p = 5; p * p <= n; p += 6) {
    if (n % p == 0 || n % (p + 2) == 0) return false;
  }
  return true;
}

Field::Field(std::uint32_t q) : q_(q) {
  if (!is_prime(q)) {
    throw std::invalid_argument("field modulus must be prime, got " +
                                std::to_string(q));
  }
}

std::uint32_t Field::pow(std::uint32_t a, std::uint64_t e) const {
  std::uint64_t base = a % q_;
  std::uint64_t acc = 1 % q_;
  while (e > 0) {
    if (e & 1) acc = acc * base % q_;
    base = base * base % q_;
    e >>= 1;
  }
  return static_cast<std::uint32_t>(acc);
}

std::uint32_t Field::inv(std::uint32_t a) const {
  if (a == 0) throw std::domain_error("division by zero in GF(q)");
  // Extended Euclid on (a, q).
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = q_, new_r = a % q_;
  while (new_r != 0) {
    std::int64_t quot = r / new_r;
    std::int64_t tmp = t - quot * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - quot * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (t < 0) t += q_;
  return static_cast<std::uint32_t>(t);
}

void Field::require_same(const Field& other) const {
  if (q_ != other.q_) {
    throw std::invalid_argument("mixed field moduli: GF(" +
                                std::to_string(q_) + ") vs GF(" +
                                std::to_string(other.q_) + ")");
  }
}

namespace detail {

void philox4x32_10(std::uint32_t ctr[4], std::uint32_t k0, std::uint32_t k1) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k0 += kW0;
      k1 += kW1;
    }
    std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    std::uint32_t c1 = ctr[1], c3 = ctr[3];
    ctr[0] = hi1 ^ c1 ^ k0;
    ctr[1] = lo1;
    ctr[2] = hi0 ^ c3 ^ k1;
    ctr[3] = lo0;
  }
}

}  // namespace detail

namespace {

inline std::uint64_t rotl64(std::uint64_t x, int b) {
  return (x << b) | (x >> (64 - b));
}

}  // namespace

std::uint64_t siphash24(std::uint64_t k0, std::uint64_t k1,
                        std::span<const std::uint8_t> data) {
  std::uint64_t v0 = k0 ^ 0x736f6d6570736575ull;
  std::uint64_t v1 = k1 ^ 0x646f72616e646f6dull;
  std::uint64_t v2 = k0 ^ 0x6c7967656e657261ull;
  std::uint64_t v3 = k1 ^ 0x7465646279746573ull;
  auto sipround = [&] {
    v0 += v1;
    v1 = rotl64(v1, 13);
    v1 ^= v0;
    v0 = rotl64(v0, 32);
    v2 += v3;
    v3 = rotl64(v3, 16);
    v3 ^= v2;
    v0 += v3;
    v3 = rotl64(v3, 21);
    v3 ^= v0;
    v2 += v1;
    v1 = rotl64(v1, 17);
    v1 ^= v2;
    v2 = rotl64(v2, 32);
  };
  const std::size_t n = data.size();
  const std::size_t end = n - (n % 8);
  for (std::size_t off = 0; off < end; off += 8) {
    std::uint64_t m = 0;
    for (int i = 7; i >= 0; --i) m = (m << 8) | data[off + i];
    v3 ^= m;
    sipround();
    sipround();
    v0 ^= m;
  }
  std::uint64_t b = static_cast<std::uint64_t>(n & 0xff) << 56;
  for (std::size_t i = 0; i < n % 8; ++i) {
    b |= static_cast<std::uint64_t>(data[end + i]) << (8 * i);
  }
  v3 ^= b;
  sipround();
  sipround();
  v0 ^= b;
  v2 ^= 0xff;
  for (int i = 0; i < 4; ++i) sipround();
  return v0 ^ v1 ^ v2 ^ v3;
}

namespace {

// Fixed keys for seed derivation; arbitrary but frozen (digits of pi/e).
constexpr std::uint64_t kDeriveK0 = 0x243f6a8885a308d3ull;
constexpr std::uint64_t kDeriveK1 = 0x13198a2e03707344ull;

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  std::vector<std::uint8_t> msg;
  msg.reserve(8 + tag.size());
  for (int i = 0; i < 8; ++i) msg.push_back(static_cast<std::uint8_t>(seed >> (8 * i)));
  msg.insert(msg.end(), tag.begin(), tag.end());
  return siphash24(kDeriveK0, kDeriveK1, msg);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                          std::uint64_t index) {
  std::vector<std::uint8_t> msg;
  msg.reserve(16 + tag.size());
  for (int i = 0; i < 8; ++i) msg.push_back(static_cast<std::uint8_t>(seed >> (8 * i)));
  for (int i = 0; i < 8; ++i) msg.push_back(static_cast<std::uint8_t>(index >> (8 * i)));
  msg.insert(msg.end(), tag.begin(), tag.end());
  return siphash24(kDeriveK0, kDeriveK1, msg);
}

std::uint64_t RngStream::next_u64() {
  if (buffered_ == 0) {
    buf_[0] = static_cast<std::uint32_t>(counter_);
    buf_[1] = static_cast<std::uint32_t>(counter_ >> 32);
    buf_[2] = static_cast<std::uint32_t>(stream_);
    buf_[3] = static_cast<std::uint32_t>(stream_ >> 32);
    detail::philox4x32_10(buf_, static_cast<std::uint32_t>(key_),
                          static_cast<std::uint32_t>(key_ >> 32));
    ++counter_;
    buffered_ = 2;
  }
  --buffered_;
  return (static_cast<std::uint64_t>(buf_[2 * buffered_ + 1]) << 32) |
         buf_[2 * buffered_];
}

std::uint64_t RngStream::uniform(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform bound must be >= 1");
  if (bound == 1) return 0;
  // Rejection zone keeps the draw exactly uniform.
  const std::uint64_t limit = ~0ull - (~0ull % bound + 1) % bound;
  std::uint64_t v = next_u64();
  while (v > limit) v = next_u64();
  return v % bound;
}

std::vector<std::uint32_t> RngStream::point(const Field& f, int n) {
  std::vector<std::uint32_t> p(n);
  for (int i = 0; i < n; ++i) p[i] = field_element(f);
  return p;
}

bool RngStream::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  // Compare against a fixed-point threshold; deterministic given the stream.
  const long double scaled = static_cast<long double>(p) * 18446744073709551616.0L;
  const std::uint64_t threshold = static_cast<std::uint64_t>(scaled);
  return next_u64() < threshold;
}

RngStream keyed_stream(std::uint64_t seed, std::string_view domain,
                       std::span<const std::uint8_t> message) {
  // Two independently keyed hashes form the 128-bit stream identity.
  std::uint64_t dk = derive_seed(seed, domain);
  std::vector<std::uint8_t> msg(message.begin(), message.end());
  std::uint64_t h0 = siphash24(dk, kDeriveK0 ^ 0x9e3779b97f4a7c15ull, msg);
  std::uint64_t h1 = siphash24(dk ^ 0xbf58476d1ce4e5b9ull, kDeriveK1, msg);
  return RngStream(h0, h1);
}

}  // namespace ldt
