#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace ocsvm::detail {

// Shortest-ish decimal form that reloads bit-exactly.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// FNV-1a, 64 bit. Used as a content check on serialized artifacts.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 14695981039346656037ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace ocsvm::detail
