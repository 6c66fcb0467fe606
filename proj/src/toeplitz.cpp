#include "qrng/toeplitz.hpp"

#include "qrng/errors.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <thread>

namespace qrng {

void ExtractorConfig::validate() const {
    if (m_out < 1 || n_in < 2) throw DomainError("extractor: need n_in >= 2 and m_out >= 1");
    if (m_out >= n_in) throw DomainError("extractor: m_out must be < n_in");
    if (seed.size() != seed_bits()) {
        throw DomainError("extractor: seed has " + std::to_string(seed.size()) +
                          " bits, expected n_in + m_out - 1 = " + std::to_string(seed_bits()));
    }
    if (bits_per_sample < 1 || bits_per_sample > 16) {
        throw DomainError("extractor: bits_per_sample must be in [1, 16]");
    }
    if (!(h_min_per_sample >= 0.0)) throw DomainError("extractor: h_min_per_sample must be >= 0");
}

void ExtractorConfig::check_security() const {
    const double allowed = h_min_per_sample / static_cast<double>(bits_per_sample);
    if (extraction_ratio() > allowed) {
        throw SecurityError("extraction ratio " + std::to_string(extraction_ratio()) +
                            " exceeds certified min-entropy per bit " + std::to_string(allowed) +
                            " (" + std::to_string(h_min_per_sample) + " bits / " +
                            std::to_string(bits_per_sample) + " bits per sample)");
    }
}

SecurityParameter security_parameter(double total_min_entropy, double m_out) {
    if (!(total_min_entropy > m_out)) {
        throw DomainError("security_parameter: min-entropy " + std::to_string(total_min_entropy) +
                          " must exceed output length " + std::to_string(m_out));
    }
    SecurityParameter sp;
    sp.log2_epsilon = -(total_min_entropy - m_out) / 2.0;
    sp.epsilon = std::exp2(sp.log2_epsilon);
    return sp;
}

double output_rate(double sampling_rate_hz, double bits_per_sample, double ratio) {
    if (sampling_rate_hz < 0.0 || bits_per_sample < 0.0 || ratio < 0.0) {
        throw DomainError("output_rate: arguments must be nonnegative");
    }
    return sampling_rate_hz * bits_per_sample * ratio;
}

ToeplitzExtractor::ToeplitzExtractor(const ExtractorConfig& cfg)
    : n_in_(cfg.n_in), m_out_(cfg.m_out), in_words_(BitVector::word_count(cfg.n_in)) {
    cfg.validate();
    const auto seed = cfg.seed.words();
    lane_words_ = seed.size() + 1;
    lanes_.assign(64 * lane_words_, 0);
    const auto word = [&](std::size_t k) -> std::uint64_t { return k < seed.size() ? seed[k] : 0; };
    for (unsigned s = 0; s < 64; ++s) {
        std::uint64_t* lane = lanes_.data() + s * lane_words_;
        for (std::size_t k = 0; k < lane_words_; ++k) {
            lane[k] = s == 0 ? word(k) : (word(k) >> s) | (word(k + 1) << (64 - s));
        }
    }
}

void ToeplitzExtractor::extract_into(std::span<const std::uint64_t> input, BitVector& output,
                                     std::size_t out_offset) const {
    const std::uint64_t* x = input.data();
    for (std::size_t i = 0; i < m_out_; ++i) {
        // Row i is the seed window starting at bit m_out - 1 - i.
        const std::size_t start = m_out_ - 1 - i;
        const std::uint64_t* w = lanes_.data() + (start & 63) * lane_words_ + (start >> 6);
        std::uint64_t acc = 0;
        for (std::size_t k = 0; k < in_words_; ++k) acc ^= w[k] & x[k];
        output.set(out_offset + i, std::popcount(acc) & 1);
    }
}

BitVector ToeplitzExtractor::extract(const BitVector& input) const {
    if (input.size() != n_in_) {
        throw DomainError("extract: input has " + std::to_string(input.size()) +
                          " bits, expected " + std::to_string(n_in_));
    }
    BitVector out(m_out_);
    extract_into(input.words(), out, 0);
    return out;
}

namespace {

// Bits [first_bit, first_bit + count) of the packed code stream.
BitVector gather_bits(std::span<const std::uint16_t> codes, int adc_bits, std::size_t first_bit,
                      std::size_t count) {
    BitVector v;
    const auto nb = static_cast<std::size_t>(adc_bits);
    std::size_t sample = first_bit / nb;
    unsigned skip = static_cast<unsigned>(first_bit % nb);
    while (v.size() < count) {
        const unsigned avail = static_cast<unsigned>(nb) - skip;
        const unsigned take = static_cast<unsigned>(std::min<std::size_t>(avail, count - v.size()));
        v.append_bits(std::uint64_t{codes[sample]} >> skip, take);
        ++sample;
        skip = 0;
    }
    return v;
}

void require_codes_fit(std::span<const std::uint16_t> codes, int adc_bits) {
    if (adc_bits < 1 || adc_bits > 16) throw DomainError("adc bits must be in [1, 16]");
    const std::uint32_t limit = std::uint32_t{1} << adc_bits;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (codes[i] >= limit) {
            throw DomainError("sample " + std::to_string(i) + " does not fit in " +
                              std::to_string(adc_bits) + " bits");
        }
    }
}

}  // namespace

BitVector extract_stream(std::span<const std::uint16_t> codes, const ExtractorConfig& cfg,
                         int adc_bits, unsigned workers) {
    require_codes_fit(codes, adc_bits);
    const ToeplitzExtractor ext(cfg);
    const std::size_t total_bits = codes.size() * static_cast<std::size_t>(adc_bits);
    const std::size_t blocks = total_bits / cfg.n_in;
    BitVector out(blocks * cfg.m_out);
    if (blocks == 0) return out;

    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(blocks)));
    // Each worker owns a contiguous block range and its own output buffer.
    std::vector<BitVector> parts(workers);
    const auto run = [&](unsigned w) {
        const std::size_t lo = blocks * w / workers;
        const std::size_t hi = blocks * (w + 1) / workers;
        BitVector& part = parts[w];
        part = BitVector((hi - lo) * cfg.m_out);
        for (std::size_t b = lo; b < hi; ++b) {
            const BitVector in = gather_bits(codes, adc_bits, b * cfg.n_in, cfg.n_in);
            ext.extract_into(in.words(), part, (b - lo) * cfg.m_out);
        }
    };
    if (workers == 1) {
        run(0);
        return std::move(parts[0]);
    }
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }
    BitVector joined;
    for (const auto& p : parts) joined.append(p);
    return joined;
}

StreamExtractor::StreamExtractor(const ToeplitzExtractor& extractor, int adc_bits)
    : extractor_(extractor), adc_bits_(adc_bits) {
    if (adc_bits < 1 || adc_bits > 16) throw DomainError("adc bits must be in [1, 16]");
}

void StreamExtractor::push(std::span<const std::uint16_t> codes, BitVector& out) {
    require_codes_fit(codes, adc_bits_);
    const std::size_t n = extractor_.input_bits();
    for (std::uint16_t c : codes) {
        std::uint64_t v = c;
        auto remaining = static_cast<unsigned>(adc_bits_);
        while (remaining > 0) {
            const auto take =
                static_cast<unsigned>(std::min<std::size_t>(remaining, n - pending_.size()));
            pending_.append_bits(v, take);
            v >>= take;
            remaining -= take;
            if (pending_.size() == n) {
                const std::size_t at = out.size();
                out.resize(at + extractor_.output_bits());
                extractor_.extract_into(pending_.words(), out, at);
                pending_.clear();
            }
        }
    }
}

BitVector parse_hex_seed(const std::string& text, std::size_t bits) {
    std::vector<std::uint8_t> bytes;
    int nibble = -1;
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        int v;
        if (ch >= '0' && ch <= '9') {
            v = ch - '0';
        } else if (ch >= 'a' && ch <= 'f') {
            v = ch - 'a' + 10;
        } else if (ch >= 'A' && ch <= 'F') {
            v = ch - 'A' + 10;
        } else {
            throw ConfigError(std::string("seed: invalid hex character '") + ch + "'");
        }
        if (nibble < 0) {
            nibble = v;
        } else {
            bytes.push_back(static_cast<std::uint8_t>((nibble << 4) | v));
            nibble = -1;
        }
    }
    if (nibble >= 0) throw ConfigError("seed: odd number of hex digits");
    const std::size_t need = (bits + 7) / 8;
    if (bytes.size() != need) {
        throw ConfigError("seed: got " + std::to_string(bytes.size()) + " bytes, expected " +
                          std::to_string(need) + " for " + std::to_string(bits) + " bits");
    }
    return BitVector::from_bytes(bytes, bits);
}

std::string to_hex(const BitVector& bits) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (std::uint8_t b : bits.to_bytes()) {
        s += digits[b >> 4];
        s += digits[b & 15];
    }
    return s;
}

}  // namespace qrng
