#pragma once

#include <cstdint>
#include <string>

namespace faultnet {

// Shortest decimal string that round-trips to the same double ("0.1", "1e-09").
std::string to_shortest(double v);

std::string to_string_u64(std::uint64_t v);

}  // namespace faultnet
