#pragma once

#include "qrng/adc.hpp"
#include "qrng/optics.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace qrng {

enum class NoiseShape {
    Gaussian,
    Uniform,  // zero-mean uniform with the requested variance
};

NoiseShape parse_noise_shape(const std::string& name);
std::string to_string(NoiseShape shape);

struct SimConfig {
    OpticalChain chain;
    double sigma_lo_sq = 0.0;
    double sigma_q_sq = 0.5;
    double sigma_e_sq = 0.0;
    // DC optical power feeding the common-mode term g * alpha * P_dc (W).
    double dc_power = 0.0;
    std::uint64_t sample_count = 1;
    std::uint64_t seed = 0;
    NoiseShape shape = NoiseShape::Gaussian;

    void validate() const;
};

// One realization of the four fluctuation inputs, in their own units.
struct FluctuationDraws {
    double x_lo = 0.0;
    double x_s = 0.0;
    double p_s = 0.0;
    double e = 0.0;
};

// Linearized subtraction voltage:
// 2 g sqrt(P) (alpha x_lo + beta (x_s cos(phi) + p_s sin(phi))) + g alpha P_dc + e.
double draw_sample(const OpticalChain& chain, const FluctuationDraws& draws, double dc_power = 0.0);

// Constant offset g * alpha * P_dc added to every sample (V).
double dc_offset_volts(const SimConfig& cfg);

struct SampleBatch {
    std::vector<double> analog;
    std::vector<std::uint16_t> codes;  // empty unless quantized
    SimConfig config;
};

struct VarianceEstimate {
    double variance = 0.0;
    double std_error = 0.0;
};

// Samples per substream. Chunk c of a run with seed s always draws from the
// generator keyed by (s, c), which makes output independent of `workers`.
inline constexpr std::uint64_t kSimChunk = 1ull << 16;

// Default cap on samples materialized by simulate_batch (64 Mi doubles).
inline constexpr std::uint64_t kDefaultSampleCap = 1ull << 26;

struct SimOptions {
    unsigned workers = 0;  // 0: hardware concurrency
    std::uint64_t sample_cap = kDefaultSampleCap;
};

// Throws ResourceError when cfg.sample_count exceeds options.sample_cap.
SampleBatch simulate_batch(const SimConfig& cfg, const std::optional<AdcConfig>& adc = std::nullopt,
                           const SimOptions& options = {});

// Streams cfg.sample_count samples chunk by chunk, in index order.
// `sink(first_index, samples)` is called once per chunk.
void simulate_stream(const SimConfig& cfg,
                     const std::function<void(std::uint64_t, std::span<const double>)>& sink,
                     const SimOptions& options = {});

void quantize_into(std::span<const double> analog, const AdcConfig& adc,
                   std::vector<std::uint16_t>& codes);

// Unbiased sample variance and its Gaussian standard error sqrt(2/(N-1)) s^2.
VarianceEstimate empirical_variance(std::span<const double> samples);

// "index,analog[V],code" rows; code column empty if the batch is unquantized.
std::string batch_to_csv(const SampleBatch& batch);

}  // namespace qrng
