#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qrng {

// n-bit ADC. `range_r` is the full-scale span: 2^n bins of width
// R / 2^n, bin k centred at offset + (k - 2^(n-1)) * bin_width. The centre
// code 2^(n-1) sits on the offset; the lowest and highest bins absorb
// everything outside the span.
struct AdcConfig {
    int bits = 12;
    double range_r = 1.0;  // V
    double offset = 0.0;   // V

    void validate() const;

    double bin_width() const;
    std::uint32_t code_count() const { return std::uint32_t{1} << bits; }
    std::uint32_t max_code() const { return code_count() - 1; }
    std::uint32_t center_code() const { return std::uint32_t{1} << (bits - 1); }

    // Lower edge of the top (clamped) bin relative to the offset: R/2 - 3*delta/2.
    double top_bin_lower_edge() const;
    // Upper edge of the bottom (clamped) bin relative to the offset: -R/2 + delta/2.
    double bottom_bin_upper_edge() const;
    // Centre voltage of bin k (absolute, including offset).
    double bin_center(std::uint32_t code) const;
};

enum class QuantizationMode {
    ThreeTerm,  // correction 3 * (delta/12)^2
    Standard,   // correction delta^2 / 12
};

struct QuantizationPolicy {
    QuantizationMode mode = QuantizationMode::ThreeTerm;
    // Measured per-value quantization variance (V^2). When set it replaces
    // the delta-derived per-value variance; the mode still picks the
    // multiplier (3 for three-term, 1 for standard).
    std::optional<double> measured_variance;
};

std::uint32_t quantize(double volts, const AdcConfig& cfg);

// Per-value quantization error variance: (delta/12)^2 or delta^2/12.
double quantization_error_variance(const AdcConfig& cfg, const QuantizationPolicy& policy);

// Term subtracted from the measured variance in the practical min-entropy.
double quantization_correction(const AdcConfig& cfg, const QuantizationPolicy& policy);

std::string to_string(QuantizationMode mode);
QuantizationMode parse_quantization_mode(const std::string& name);

// Sample container: raw file of consecutive uint16 little-endian words (low
// n bits significant) plus a one-line text sidecar "<path>.meta".
struct SampleFile {
    AdcConfig adc;
    std::vector<std::uint16_t> codes;
};

std::filesystem::path sidecar_path(const std::filesystem::path& samples);

std::string format_sidecar(const AdcConfig& cfg, std::uint64_t count);
// Returns the ADC config and sample count recorded in a sidecar line.
std::pair<AdcConfig, std::uint64_t> parse_sidecar(const std::string& text);

void append_codes_le(std::vector<std::uint8_t>& out, std::span<const std::uint16_t> codes);

void write_sample_file(const std::filesystem::path& path, const AdcConfig& cfg,
                       std::span<const std::uint16_t> codes);
SampleFile read_sample_file(const std::filesystem::path& path);

}  // namespace qrng
