#include "qrng/bitvector.hpp"

#include "qrng/errors.hpp"

namespace qrng {

void BitVector::append_bits(std::uint64_t value, unsigned count) {
    if (count == 0) return;
    if (count < 64) value &= (std::uint64_t{1} << count) - 1;
    const std::size_t pos = size_;
    size_ += count;
    words_.resize(word_count(size_), 0);
    const unsigned shift = pos & 63;
    words_[pos >> 6] |= value << shift;
    if (shift != 0 && shift + count > 64) words_[(pos >> 6) + 1] |= value >> (64 - shift);
}

void BitVector::resize(std::size_t bits) {
    words_.resize(word_count(bits), 0);
    size_ = bits;
    if (bits & 63) words_.back() &= (std::uint64_t{1} << (bits & 63)) - 1;
}

void BitVector::append(const BitVector& other) {
    std::size_t remaining = other.size_;
    for (std::size_t w = 0; remaining > 0; ++w) {
        const unsigned take = remaining >= 64 ? 64u : static_cast<unsigned>(remaining);
        append_bits(other.words_[w], take);
        remaining -= take;
    }
}

BitVector& BitVector::operator^=(const BitVector& other) {
    if (other.size_ != size_) throw DomainError("BitVector xor: length mismatch");
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
    return *this;
}

std::vector<std::uint8_t> BitVector::to_bytes() const {
    std::vector<std::uint8_t> out((size_ + 7) / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
    }
    return out;
}

BitVector BitVector::from_bytes(std::span<const std::uint8_t> bytes) {
    return from_bytes(bytes, bytes.size() * 8);
}

BitVector BitVector::from_bytes(std::span<const std::uint8_t> bytes, std::size_t bits) {
    if (bits > bytes.size() * 8) throw DomainError("BitVector::from_bytes: not enough bytes");
    BitVector v(bits);
    for (std::size_t i = 0; i < (bits + 7) / 8; ++i) {
        v.words_[i / 8] |= std::uint64_t{bytes[i]} << (8 * (i % 8));
    }
    if (bits & 63) v.words_.back() &= (std::uint64_t{1} << (bits & 63)) - 1;
    return v;
}

std::string BitVector::to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
        if (get(i)) s[i] = '1';
    }
    return s;
}

BitVector BitVector::from_string(const std::string& bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            v.set(i, true);
        } else if (bits[i] != '0') {
            throw DomainError("BitVector::from_string: expected only '0' and '1'");
        }
    }
    return v;
}

}  // namespace qrng
