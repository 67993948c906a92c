#ifndef PATHMATCH_BYTES_HPP
#define PATHMATCH_BYTES_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pathmatch {

/// Little-endian append-only encoder used by every on-wire and on-disk blob,
/// so layouts stay identical across hosts.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<std::byte>(v)); }

    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i)
            buf_.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xffU));
    }

    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i)
            buf_.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xffU));
    }

    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    void bytes(std::span<const std::byte> data) {
        buf_.insert(buf_.end(), data.begin(), data.end());
    }

    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        for (char c : s)
            buf_.push_back(static_cast<std::byte>(c));
    }

    const std::vector<std::byte>& data() const { return buf_; }
    std::vector<std::byte> take() { return std::move(buf_); }
    std::size_t size() const { return buf_.size(); }

private:
    std::vector<std::byte> buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::byte> data) : data_(data) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }

    std::uint32_t u32() {
        auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(b[i])) << (8 * i);
        return v;
    }

    std::uint64_t u64() {
        auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(std::to_integer<std::uint8_t>(b[i])) << (8 * i);
        return v;
    }

    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64() { return std::bit_cast<double>(u64()); }

    std::span<const std::byte> bytes(std::size_t n) { return take(n); }

    std::string str() {
        std::uint32_t n = u32();
        auto b = take(n);
        std::string s(n, '\0');
        for (std::uint32_t i = 0; i < n; ++i)
            s[i] = static_cast<char>(std::to_integer<std::uint8_t>(b[i]));
        return s;
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }

private:
    std::span<const std::byte> take(std::size_t n) {
        if (pos_ + n > data_.size())
            throw std::out_of_range("ByteReader: truncated buffer");
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::span<const std::byte> data_;
    std::size_t pos_ = 0;
};

} // namespace pathmatch

#endif
