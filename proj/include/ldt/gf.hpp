#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ldt {

// Prime field GF(q). Elements are canonical residues in [0, q) stored as
// uint32_t; all arithmetic goes through an explicit Field context so that
// element storage stays one machine word. Mixing objects built over
// different fields is a hard error wherever two such objects meet.
class Field {
 public:
  // Throws std::invalid_argument unless q is a prime >= 2.
  explicit Field(std::uint32_t q);

  std::uint32_t q() const { return q_; }

  std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    std::uint32_t s = a + b;
    return s >= q_ ? s - q_ : s;
  }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const {
    return a >= b ? a - b : a + q_ - b;
  }
  std::uint32_t neg(std::uint32_t a) const { return a == 0 ? 0 : q_ - a; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    return static_cast<std::uint32_t>(
        (static_cast<std::uint64_t>(a) * b) % q_);
  }
  // Reduces an arbitrary 64-bit value into [0, q).
  std::uint32_t reduce(std::uint64_t v) const {
    return static_cast<std::uint32_t>(v % q_);
  }
  std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;
  // Multiplicative inverse via extended Euclid. Throws std::domain_error
  // on a == 0.
  std::uint32_t inv(std::uint32_t a) const;

  bool operator==(const Field& other) const { return q_ == other.q_; }
  // Throws std::invalid_argument when the moduli differ.
  void require_same(const Field& other) const;

  static bool is_prime(std::uint64_t n);

 private:
  std::uint32_t q_;
};

// --- Counter-based deterministic randomness -------------------------------
//
// Philox4x32-10 keyed by a 64-bit seed; the 128-bit counter is split into a
// 64-bit stream id and a 64-bit draw counter. Substream (seed, id) is fully
// determined, so parallel workers derive independent streams without
// coordination and results do not depend on scheduling.

namespace detail {
void philox4x32_10(std::uint32_t ctr[4], std::uint32_t k0, std::uint32_t k1);
}

// SipHash-2-4 with an explicit 128-bit key. Used both to derive operation
// seeds from (seed, tag) and as the keyed hash behind implicit tables.
std::uint64_t siphash24(std::uint64_t k0, std::uint64_t k1,
                        std::span<const std::uint8_t> data);

// Deterministic seed derivation: distinct tags give independent seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                          std::uint64_t index);

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : key_(seed), stream_(stream) {}

  std::uint64_t next_u64();
  // Uniform in [0, bound) by rejection; bound >= 1.
  std::uint64_t uniform(std::uint64_t bound);
  // Uniform field element.
  std::uint32_t field_element(const Field& f) { return static_cast<std::uint32_t>(uniform(f.q())); }
  // Uniform point of GF(q)^n.
  std::vector<std::uint32_t> point(const Field& f, int n);
  // Bernoulli with success probability p (p <= 0 never, p >= 1 always).
  bool bernoulli(double p);

 private:
  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::uint32_t buf_[4] = {0, 0, 0, 0};
  int buffered_ = 0;  // 64-bit words left in buf_
};

// Stream whose id is the 128-bit keyed hash of an arbitrary byte string;
// the basis of order-independent implicit tables.
RngStream keyed_stream(std::uint64_t seed, std::string_view domain,
                       std::span<const std::uint8_t> message);

}  // namespace ldt
