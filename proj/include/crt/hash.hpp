#pragma once

#include <cstdint>
#include <string_view>

namespace crt {

/// FNV-1a, used for provenance tags in data files.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace crt
