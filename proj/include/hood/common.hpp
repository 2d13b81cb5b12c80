#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hood {

/// Thrown when an operation's preconditions are violated (bad shapes,
/// out-of-range arguments, non-finite inputs where finite ones are required).
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when training or evaluation produces a non-finite value.
class NumericFailure : public std::runtime_error {
 public:
  explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractViolation(msg);
}

inline bool is_finite(double v) { return std::isfinite(v); }

/// FNV-1a 64-bit hash, used to stamp output files with the resolved config.
inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

}  // namespace hood
