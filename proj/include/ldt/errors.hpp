#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ldt {

// Thrown when rejection sampling exhausts its draw budget, e.g. when
// conditioning on a value sigma that the table essentially never assigns
// at the point x. Carries the number of draws attempted.
class RareEventError : public std::runtime_error {
 public:
  RareEventError(const std::string& what, std::uint64_t draws)
      : std::runtime_error(what), draws_(draws) {}
  std::uint64_t draws() const { return draws_; }

 private:
  std::uint64_t draws_;
};

// Thrown when an exhaustive computation (enumeration, dense spectrum, ...)
// would exceed its configured size cap.
class ResourceCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ldt
