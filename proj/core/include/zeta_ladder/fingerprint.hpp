#pragma once

#include <cstdint>
#include <string>

namespace zeta_ladder {

// FNV-1a over a canonical config string; used to key caches so results from
// incompatible configurations can never mix.
std::uint64_t fnv1a64(const std::string& s);

std::string fingerprint_hex(std::uint64_t fp);

// Canonical text form of a double (17 significant digits, round-trip exact).
std::string canonical_double(double v);

}  // namespace zeta_ladder
