#include "qrng/simulator.hpp"

#include "qrng/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>

namespace qrng {

NoiseShape parse_noise_shape(const std::string& name) {
    if (name == "gaussian") return NoiseShape::Gaussian;
    if (name == "uniform") return NoiseShape::Uniform;
    throw ConfigError("unknown noise shape '" + name + "' (expected gaussian or uniform)");
}

std::string to_string(NoiseShape shape) {
    return shape == NoiseShape::Gaussian ? "gaussian" : "uniform";
}

void SimConfig::validate() const {
    chain.validate();
    if (!(sigma_lo_sq >= 0.0) || !(sigma_q_sq >= 0.0) || !(sigma_e_sq >= 0.0)) {
        throw DomainError("simulation: variances must be >= 0");
    }
    if (!(dc_power >= 0.0)) throw DomainError("simulation: dc_power must be >= 0");
    if (sample_count < 1) throw DomainError("simulation: sample_count must be >= 1");
}

double draw_sample(const OpticalChain& chain, const FluctuationDraws& d, double dc_power) {
    const auto k = imbalance_coefficients(chain);
    const double quadrature = d.x_s * std::cos(chain.phase) + d.p_s * std::sin(chain.phase);
    return 2.0 * chain.gain * std::sqrt(chain.power) * (k.alpha * d.x_lo + k.beta * quadrature) +
           chain.gain * k.alpha * dc_power + d.e;
}

double dc_offset_volts(const SimConfig& cfg) {
    return cfg.chain.gain * imbalance_coefficients(cfg.chain).alpha * cfg.dc_power;
}

namespace {

class UnitNoise {
public:
    UnitNoise(std::uint64_t seed, std::uint64_t stream, NoiseShape shape) : shape_(shape) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    double operator()() {
        if (shape_ == NoiseShape::Gaussian) return normal_(engine_);
        return uniform_(engine_);
    }

private:
    NoiseShape shape_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{-std::sqrt(3.0), std::sqrt(3.0)};
};

struct ChunkKernel {
    double lo_gain;  // volts per unit x_lo draw
    double s_cos;
    double s_sin;
    double dc;
    double sigma_lo, sigma_q, sigma_e;

    explicit ChunkKernel(const SimConfig& cfg) {
        const auto k = imbalance_coefficients(cfg.chain);
        const double amp = 2.0 * cfg.chain.gain * std::sqrt(cfg.chain.power);
        lo_gain = amp * k.alpha;
        s_cos = amp * k.beta * std::cos(cfg.chain.phase);
        s_sin = amp * k.beta * std::sin(cfg.chain.phase);
        dc = cfg.chain.gain * k.alpha * cfg.dc_power;
        sigma_lo = std::sqrt(cfg.sigma_lo_sq);
        sigma_q = std::sqrt(cfg.sigma_q_sq);
        sigma_e = std::sqrt(cfg.sigma_e_sq);
    }

    void fill(const SimConfig& cfg, std::uint64_t chunk, std::span<double> out) const {
        UnitNoise noise(cfg.seed, chunk, cfg.shape);
        for (double& v : out) {
            const double x_lo = sigma_lo * noise();
            const double x_s = sigma_q * noise();
            const double p_s = sigma_q * noise();
            const double e = sigma_e * noise();
            v = (lo_gain * x_lo + (s_cos * x_s + s_sin * p_s)) + dc + e;
        }
    }
};

unsigned resolve_workers(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fill() over chunks [0, chunks) in waves of `workers`, handing each
// wave to `deliver` in chunk order.
template <typename Deliver>
void run_chunks(const SimConfig& cfg, unsigned workers, Deliver&& deliver) {
    const ChunkKernel kernel(cfg);
    const std::uint64_t total = cfg.sample_count;
    const std::uint64_t chunks = (total + kSimChunk - 1) / kSimChunk;
    std::vector<std::vector<double>> buffers(workers, std::vector<double>(kSimChunk));

    for (std::uint64_t first = 0; first < chunks; first += workers) {
        const unsigned wave = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks - first));
        const auto len = [&](std::uint64_t c) {
            return static_cast<std::size_t>(std::min(kSimChunk, total - c * kSimChunk));
        };
        if (wave == 1) {
            kernel.fill(cfg, first, std::span(buffers[0]).first(len(first)));
        } else {
            std::vector<std::jthread> pool;
            pool.reserve(wave);
            for (unsigned w = 0; w < wave; ++w) {
                const std::uint64_t c = first + w;
                pool.emplace_back([&, c, w] { kernel.fill(cfg, c, std::span(buffers[w]).first(len(c))); });
            }
        }
        for (unsigned w = 0; w < wave; ++w) {
            const std::uint64_t c = first + w;
            deliver(c * kSimChunk, std::span<const double>(buffers[w]).first(len(c)));
        }
    }
}

}  // namespace

void simulate_stream(const SimConfig& cfg,
                     const std::function<void(std::uint64_t, std::span<const double>)>& sink,
                     const SimOptions& options) {
    cfg.validate();
    run_chunks(cfg, resolve_workers(options.workers), sink);
}

SampleBatch simulate_batch(const SimConfig& cfg, const std::optional<AdcConfig>& adc,
                           const SimOptions& options) {
    cfg.validate();
    if (cfg.sample_count > options.sample_cap) {
        throw ResourceError("simulate_batch: " + std::to_string(cfg.sample_count) +
                            " samples exceeds the in-memory cap of " +
                            std::to_string(options.sample_cap) + "; use simulate_stream");
    }
    if (adc) adc->validate();

    SampleBatch batch;
    batch.config = cfg;
    batch.analog.resize(cfg.sample_count);
    run_chunks(cfg, resolve_workers(options.workers),
               [&](std::uint64_t first, std::span<const double> chunk) {
                   std::copy(chunk.begin(), chunk.end(), batch.analog.begin() + first);
               });
    if (adc) quantize_into(batch.analog, *adc, batch.codes);
    return batch;
}

void quantize_into(std::span<const double> analog, const AdcConfig& adc,
                   std::vector<std::uint16_t>& codes) {
    codes.resize(analog.size());
    for (std::size_t i = 0; i < analog.size(); ++i) {
        codes[i] = static_cast<std::uint16_t>(quantize(analog[i], adc));
    }
}

VarianceEstimate empirical_variance(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw DomainError("empirical_variance: need at least 2 samples");
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    double comp = 0.0;  // corrected two-pass
    for (double v : samples) {
        const double d = v - mean;
        ss += d * d;
        comp += d;
    }
    VarianceEstimate est;
    est.variance = (ss - comp * comp / static_cast<double>(n)) / static_cast<double>(n - 1);
    est.std_error = std::sqrt(2.0 / static_cast<double>(n - 1)) * est.variance;
    return est;
}

std::string batch_to_csv(const SampleBatch& batch) {
    std::string out = "index,analog[V],code\n";
    char line[96];
    const bool has_codes = batch.codes.size() == batch.analog.size();
    for (std::size_t i = 0; i < batch.analog.size(); ++i) {
        if (has_codes) {
            std::snprintf(line, sizeof line, "%zu,%.17g,%u\n", i, batch.analog[i],
                          static_cast<unsigned>(batch.codes[i]));
        } else {
            std::snprintf(line, sizeof line, "%zu,%.17g,\n", i, batch.analog[i]);
        }
        out += line;
    }
    return out;
}

}  // namespace qrng
