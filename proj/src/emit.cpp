#include "orbitsiege/emit.hpp"

#include <cmath>
#include <cstdio>

namespace orbitsiege {

std::string format_sig6(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string format_cost(double value) {
  if (std::isfinite(value) && value == std::floor(value) && std::abs(value) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", value);
    return buf;
  }
  return format_sig6(value);
}

std::string format_int(std::int64_t value) { return std::to_string(value); }

}  // namespace orbitsiege
