#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace orbitsiege {

// Shared number formatting for every emitted artifact.
std::string format_sig6(double value);     // angles and ratios: %.6g
std::string format_cost(double value);     // integral values exactly, else %.6g
std::string format_int(std::int64_t value);

}  // namespace orbitsiege
