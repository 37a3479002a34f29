/*
 * gf256.hpp: table-based arithmetic in GF(2^8) with reduction polynomial
 * x^8 + x^4 + x^3 + x + 1 (0x11B). Addition is XOR; multiplication and
 * inversion go through log/antilog tables built over the generator 0x03.
 */
#ifndef HOTCACHE_GF256_HPP
#define HOTCACHE_GF256_HPP

#include <array>
#include <cstdint>

#include "hotcache/common.hpp"

namespace hotcache::gf {

inline constexpr unsigned kPoly = 0x11B;

namespace detail {

struct Tables {
    std::array<std::uint8_t, 512> exp{}; // doubled so mul needs no modulo
    std::array<std::uint8_t, 256> log{};
};

consteval Tables build_tables() {
    Tables t{};
    unsigned x = 1;
    for (int i = 0; i < 255; ++i) {
        t.exp[i] = static_cast<std::uint8_t>(x);
        t.log[x] = static_cast<std::uint8_t>(i);
        // multiply by the generator 0x03 = x + 1
        unsigned x2 = x << 1;
        if (x2 & 0x100) x2 ^= kPoly;
        x = (x2 ^ x) & 0xFF;
    }
    for (int i = 255; i < 512; ++i) t.exp[i] = t.exp[i - 255];
    return t;
}

inline constexpr Tables kTables = build_tables();

} // namespace detail

inline std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }

inline std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
    if (a == 0 || b == 0) return 0;
    return detail::kTables.exp[detail::kTables.log[a] + detail::kTables.log[b]];
}

inline std::uint8_t inv(std::uint8_t a) {
    if (a == 0) throw param_error("gf256: zero has no multiplicative inverse");
    return detail::kTables.exp[255 - detail::kTables.log[a]];
}

inline std::uint8_t div(std::uint8_t a, std::uint8_t b) {
    if (b == 0) throw param_error("gf256: division by zero");
    if (a == 0) return 0;
    return detail::kTables.exp[detail::kTables.log[a] + 255 - detail::kTables.log[b]];
}

inline std::uint8_t pow(std::uint8_t a, unsigned e) {
    if (e == 0) return 1;
    if (a == 0) return 0;
    return detail::kTables.exp[(detail::kTables.log[a] * e) % 255];
}

} // namespace hotcache::gf

#endif
