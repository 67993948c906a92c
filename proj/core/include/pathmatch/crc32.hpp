#ifndef PATHMATCH_CRC32_HPP
#define PATHMATCH_CRC32_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace pathmatch {

namespace detail {

constexpr std::array<std::uint32_t, 256> make_crc32_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) {
            c = (c & 1) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
        }
        table[i] = c;
    }
    return table;
}

inline constexpr auto crc32_table = make_crc32_table();

} // namespace detail

// Reflected CRC-32 (polynomial 0xEDB88320, init/final xor 0xFFFFFFFF).
// crc32("123456789") == 0xCBF43926.
inline std::uint32_t crc32(std::span<const std::byte> data) {
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::byte b : data) {
        c = detail::crc32_table[(c ^ static_cast<std::uint8_t>(b)) & 0xFFu] ^ (c >> 8);
    }
    return c ^ 0xFFFFFFFFu;
}

inline std::uint32_t crc32(const void* data, std::size_t len) {
    return crc32(std::span<const std::byte>(static_cast<const std::byte*>(data), len));
}

} // namespace pathmatch

#endif
