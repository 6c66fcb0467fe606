#include "qrng/adc.hpp"

#include "qrng/errors.hpp"
#include "qrng/io.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace qrng {

void AdcConfig::validate() const {
    if (bits < 1 || bits > 16) {
        throw DomainError("adc: bits must be in [1, 16], got " + std::to_string(bits));
    }
    if (!(range_r > 0.0) || !std::isfinite(range_r)) {
        throw DomainError("adc: range_r must be a finite value > 0");
    }
    if (!std::isfinite(offset)) throw DomainError("adc: offset must be finite");
}

double AdcConfig::bin_width() const { return std::ldexp(range_r, -bits); }

double AdcConfig::top_bin_lower_edge() const { return 0.5 * range_r - 1.5 * bin_width(); }

double AdcConfig::bottom_bin_upper_edge() const { return -0.5 * range_r + 0.5 * bin_width(); }

double AdcConfig::bin_center(std::uint32_t code) const {
    return offset + (static_cast<double>(code) - static_cast<double>(center_code())) * bin_width();
}

std::uint32_t quantize(double volts, const AdcConfig& cfg) {
    if (std::isnan(volts)) throw DomainError("quantize: input is NaN");
    // Bin index relative to the centre code, half-open [c - d/2, c + d/2).
    const double rel = std::floor((volts - cfg.offset) / cfg.bin_width() + 0.5);
    const double lo = -static_cast<double>(cfg.center_code());
    const double hi = static_cast<double>(cfg.max_code() - cfg.center_code());
    if (rel <= lo) return 0;
    if (rel >= hi) return cfg.max_code();
    return static_cast<std::uint32_t>(static_cast<std::int64_t>(rel) + cfg.center_code());
}

double quantization_error_variance(const AdcConfig& cfg, const QuantizationPolicy& policy) {
    if (policy.measured_variance) {
        if (!(*policy.measured_variance >= 0.0)) {
            throw DomainError("measured quantization variance must be >= 0");
        }
        return *policy.measured_variance;
    }
    const double d = cfg.bin_width();
    switch (policy.mode) {
        case QuantizationMode::ThreeTerm: return (d / 12.0) * (d / 12.0);
        case QuantizationMode::Standard: return d * d / 12.0;
    }
    return 0.0;
}

double quantization_correction(const AdcConfig& cfg, const QuantizationPolicy& policy) {
    const double per_value = quantization_error_variance(cfg, policy);
    return policy.mode == QuantizationMode::ThreeTerm ? 3.0 * per_value : per_value;
}

std::string to_string(QuantizationMode mode) {
    return mode == QuantizationMode::ThreeTerm ? "three-term" : "standard";
}

QuantizationMode parse_quantization_mode(const std::string& name) {
    if (name == "three-term") return QuantizationMode::ThreeTerm;
    if (name == "standard") return QuantizationMode::Standard;
    throw ConfigError("unknown quantization policy '" + name +
                      "' (expected three-term or standard)");
}

std::filesystem::path sidecar_path(const std::filesystem::path& samples) {
    return samples.string() + ".meta";
}

std::string format_sidecar(const AdcConfig& cfg, std::uint64_t count) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "# uint16 little-endian words, low n bits significant\n"
                  "n=%d range_r=%.17g offset=%.17g count=%llu\n",
                  cfg.bits, cfg.range_r, cfg.offset, static_cast<unsigned long long>(count));
    return buf;
}

std::pair<AdcConfig, std::uint64_t> parse_sidecar(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::map<std::string, std::string> kv;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream tokens(line);
        std::string tok;
        while (tokens >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) throw ConfigError("sidecar: malformed token '" + tok + "'");
            kv[tok.substr(0, eq)] = tok.substr(eq + 1);
        }
        break;  // single header line
    }
    for (const char* key : {"n", "range_r", "offset", "count"}) {
        if (!kv.count(key)) throw ConfigError(std::string("sidecar: missing key '") + key + "'");
    }
    AdcConfig cfg;
    std::uint64_t count = 0;
    try {
        cfg.bits = std::stoi(kv["n"]);
        cfg.range_r = std::stod(kv["range_r"]);
        cfg.offset = std::stod(kv["offset"]);
        count = std::stoull(kv["count"]);
    } catch (const std::exception&) {
        throw ConfigError("sidecar: unparsable numeric value");
    }
    cfg.validate();
    return {cfg, count};
}

void append_codes_le(std::vector<std::uint8_t>& out, std::span<const std::uint16_t> codes) {
    out.reserve(out.size() + 2 * codes.size());
    for (std::uint16_t c : codes) {
        out.push_back(static_cast<std::uint8_t>(c & 0xff));
        out.push_back(static_cast<std::uint8_t>(c >> 8));
    }
}

void write_sample_file(const std::filesystem::path& path, const AdcConfig& cfg,
                       std::span<const std::uint16_t> codes) {
    std::vector<std::uint8_t> bytes;
    append_codes_le(bytes, codes);
    write_file_atomic(path, bytes);
    write_file_atomic(sidecar_path(path), format_sidecar(cfg, codes.size()));
}

SampleFile read_sample_file(const std::filesystem::path& path) {
    auto [cfg, count] = parse_sidecar(read_file_text(sidecar_path(path)));
    const auto bytes = read_file_bytes(path);
    if (bytes.size() != 2 * count) {
        throw IoError(path.string() + ": size " + std::to_string(bytes.size()) +
                      " bytes does not match sidecar count " + std::to_string(count));
    }
    SampleFile sf;
    sf.adc = cfg;
    sf.codes.resize(count);
    const std::uint16_t mask = static_cast<std::uint16_t>(cfg.max_code());
    for (std::size_t i = 0; i < count; ++i) {
        const auto w = static_cast<std::uint16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
        if (w & ~mask) {
            throw IoError(path.string() + ": sample " + std::to_string(i) + " exceeds " +
                          std::to_string(cfg.bits) + " bits");
        }
        sf.codes[i] = w;
    }
    return sf;
}

}  // namespace qrng
