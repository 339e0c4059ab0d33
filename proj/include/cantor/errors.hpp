#pragma once

#include <stdexcept>
#include <string>

namespace cantor {

// The construction itself could not proceed (ladder exhausted, Newton
// divergence after all retries, underflow of a tracked quantity, ...).
struct construction_error : std::runtime_error {
  explicit construction_error(const std::string& what) : std::runtime_error(what) {}
};

// A produced object failed one of its checks (certificate, invariant).
struct verification_error : std::runtime_error {
  explicit verification_error(const std::string& what) : std::runtime_error(what) {}
};

// Bad arguments / malformed inputs.
struct usage_error : std::runtime_error {
  explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cantor
