#pragma once

#include "qrng/bitvector.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qrng {

struct ExtractorConfig {
    std::size_t n_in = 7680;
    std::size_t m_out = 768;
    BitVector seed;  // n_in + m_out - 1 bits
    double h_min_per_sample = 0.0;
    int bits_per_sample = 12;

    std::size_t seed_bits() const { return n_in + m_out - 1; }
    double extraction_ratio() const {
        return static_cast<double>(m_out) / static_cast<double>(n_in);
    }

    // Dimensions and seed length. Throws DomainError.
    void validate() const;
    // Throws SecurityError if m_out/n_in exceeds h_min_per_sample/bits_per_sample.
    void check_security() const;
};

struct SecurityParameter {
    double epsilon = 1.0;
    double log2_epsilon = 0.0;
};

// Leftover-hash bound for hashing k bits of min-entropy down to m bits:
// log2(eps) = -(k - m)/2. Throws DomainError when k <= m.
SecurityParameter security_parameter(double total_min_entropy, double m_out);

// sampling_rate * bits_per_sample * ratio, in bits per second.
double output_rate(double sampling_rate_hz, double bits_per_sample, double ratio);

// Toeplitz hash over GF(2): y = T x with T an m_out x n_in matrix,
// T[i][j] = seed[m_out - 1 - i + j]. Column 0 read bottom-up is
// seed[0..m_out), row 0 is seed[m_out-1 .. n_in+m_out-1).
class ToeplitzExtractor {
public:
    explicit ToeplitzExtractor(const ExtractorConfig& cfg);

    std::size_t input_bits() const { return n_in_; }
    std::size_t output_bits() const { return m_out_; }

    BitVector extract(const BitVector& input) const;

    // Word-level form: `input` holds n_in bits (padding zero), `output`
    // receives m_out bits starting at bit `out_offset`.
    void extract_into(std::span<const std::uint64_t> input, BitVector& output,
                      std::size_t out_offset) const;

private:
    std::size_t n_in_;
    std::size_t m_out_;
    std::size_t in_words_;
    std::size_t lane_words_;
    // Seed shifted right by s bits for s in [0, 64), so any window of the
    // seed starts word-aligned in one of the lanes.
    std::vector<std::uint64_t> lanes_;
};

// Packs sample codes sample-major, LSB-first within each sample into a bit
// stream, cuts it into n_in-bit blocks, and hashes each block. The trailing
// partial block is discarded.
BitVector extract_stream(std::span<const std::uint16_t> codes, const ExtractorConfig& cfg,
                         int adc_bits, unsigned workers = 1);

// Incremental form of extract_stream for inputs that do not fit in memory.
class StreamExtractor {
public:
    StreamExtractor(const ToeplitzExtractor& extractor, int adc_bits);

    // Appends the hashes of every block completed by `codes` to `out`.
    void push(std::span<const std::uint16_t> codes, BitVector& out);
    std::size_t pending_bits() const { return pending_.size(); }

private:
    const ToeplitzExtractor& extractor_;
    int adc_bits_;
    BitVector pending_;
};

// Hex text (whitespace ignored), bytes in order, bits LSB-first per byte.
// Requires exactly ceil(bits/8) bytes.
BitVector parse_hex_seed(const std::string& text, std::size_t bits);
std::string to_hex(const BitVector& bits);

}  // namespace qrng
