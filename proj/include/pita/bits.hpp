#ifndef PITA_BITS_HPP
#define PITA_BITS_HPP

#include <cstdint>
#include <cstring>
#include <string>
#include <type_traits>
#include <vector>

#include "pita/error.hpp"

namespace pita {

// Fixed-width bit vector, MSB-first in a byte array. Bit 0 is the most
// significant bit of byte 0; widths not divisible by 8 are padded at the
// tail. This is the canonical serialization for event metadata, contexts
// and headers.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(size_t bits) : bits_(bits), bytes_((bits + 7) / 8, 0) {}

    size_t bit_size() const { return bits_; }
    size_t byte_size() const { return bytes_.size(); }
    const std::vector<uint8_t>& bytes() const { return bytes_; }
    std::vector<uint8_t>& bytes() { return bytes_; }

    bool get_bit(size_t i) const {
        PITA_CHECK(i < bits_, "BitVector bit index in range");
        return (bytes_[i / 8] >> (7 - (i % 8))) & 1u;
    }
    void set_bit(size_t i, bool v) {
        PITA_CHECK(i < bits_, "BitVector bit index in range");
        uint8_t m = uint8_t(1u << (7 - (i % 8)));
        if (v) bytes_[i / 8] |= m; else bytes_[i / 8] &= uint8_t(~m);
    }

    // Write `width` bits of `value` (MSB first) starting at bit `off`.
    void set_field(size_t off, size_t width, uint64_t value) {
        PITA_CHECK(width <= 64 && off + width <= bits_, "BitVector field in range");
        for (size_t k = 0; k < width; ++k)
            set_bit(off + k, (value >> (width - 1 - k)) & 1u);
    }
    uint64_t get_field(size_t off, size_t width) const {
        PITA_CHECK(width <= 64 && off + width <= bits_, "BitVector field in range");
        uint64_t v = 0;
        for (size_t k = 0; k < width; ++k) v = (v << 1) | uint64_t(get_bit(off + k));
        return v;
    }

    bool operator==(const BitVector& o) const {
        return bits_ == o.bits_ && bytes_ == o.bytes_;
    }
    bool operator!=(const BitVector& o) const { return !(*this == o); }

    std::string hex() const {
        static const char* d = "0123456789abcdef";
        std::string s;
        s.reserve(bytes_.size() * 2);
        for (uint8_t b : bytes_) { s.push_back(d[b >> 4]); s.push_back(d[b & 0xf]); }
        return s;
    }

    // Reinterpret the byte storage as a trivially-copyable struct. The
    // struct must fit in the configured width; the tail stays zero.
    template <typename T>
    T as() const {
        static_assert(std::is_trivially_copyable_v<T>);
        PITA_CHECK(sizeof(T) <= bytes_.size(), "struct fits in bit vector");
        T t;
        std::memcpy(&t, bytes_.data(), sizeof(T));
        return t;
    }
    template <typename T>
    void store(const T& t) {
        static_assert(std::is_trivially_copyable_v<T>);
        PITA_CHECK(sizeof(T) <= bytes_.size(), "struct fits in bit vector");
        std::memcpy(bytes_.data(), &t, sizeof(T));
    }

private:
    size_t bits_ = 0;
    std::vector<uint8_t> bytes_;
};

} // namespace pita

#endif
