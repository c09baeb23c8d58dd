#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

namespace gcph {

// Shortest representation that round-trips the exact double. Used for every
// emitted CSV/JSON number so repeated runs produce identical bytes.
inline std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex(std::uint64_t v);

} // namespace gcph
