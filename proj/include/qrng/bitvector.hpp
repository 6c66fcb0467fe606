#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qrng {

// Packed bit sequence, bit i at word i/64, position i%64. Bits past size()
// in the last word are kept zero.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t bits) : size_(bits), words_(word_count(bits), 0) {}

    static std::size_t word_count(std::size_t bits) { return (bits + 63) / 64; }

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v) {
        const std::uint64_t m = std::uint64_t{1} << (i & 63);
        if (v) {
            words_[i >> 6] |= m;
        } else {
            words_[i >> 6] &= ~m;
        }
    }

    // New bits are zero; shrinking clears the dropped bits.
    void resize(std::size_t bits);
    void clear() {
        size_ = 0;
        words_.clear();
    }

    void push_back(bool v) {
        if ((size_ & 63) == 0) words_.push_back(0);
        ++size_;
        set(size_ - 1, v);
    }

    // Appends the low `count` bits of `value`, least significant first.
    void append_bits(std::uint64_t value, unsigned count);
    void append(const BitVector& other);

    std::span<const std::uint64_t> words() const { return words_; }
    std::span<std::uint64_t> words() { return words_; }

    std::size_t popcount() const {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    BitVector& operator^=(const BitVector& other);
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
    bool operator==(const BitVector& other) const = default;

    // Bytes LSB-first: bit i is bit (i % 8) of byte i / 8; final byte zero-padded.
    std::vector<std::uint8_t> to_bytes() const;
    static BitVector from_bytes(std::span<const std::uint8_t> bytes);
    static BitVector from_bytes(std::span<const std::uint8_t> bytes, std::size_t bits);

    // "0"/"1" characters, index 0 first.
    std::string to_string() const;
    static BitVector from_string(const std::string& bits);

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace qrng
