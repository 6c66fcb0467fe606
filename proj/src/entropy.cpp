#include "qrng/entropy.hpp"

#include "qrng/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace qrng {

double min_entropy_discrete(std::span<const double> probabilities) {
    if (probabilities.empty()) throw DomainError("min_entropy_discrete: empty distribution");
    double sum = 0.0;
    double peak = 0.0;
    for (double p : probabilities) {
        if (!(p >= 0.0)) throw DomainError("min_entropy_discrete: negative or NaN probability");
        sum += p;
        peak = std::max(peak, p);
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw DomainError("min_entropy_discrete: probabilities sum to " + std::to_string(sum));
    }
    return -std::log2(peak);
}

namespace {

void require_positive_variance(double v, const char* what) {
    if (!(v > 0.0)) throw DomainError(std::string(what) + ": sigma_q_sq must be > 0");
}

}  // namespace

double c1_boundary(double sigma_q_sq, const ClassicalBound& bound, const AdcConfig& cfg) {
    require_positive_variance(sigma_q_sq, "c1_boundary");
    cfg.validate();
    const double shift = bound.e_max + bound.delta_max - cfg.top_bin_lower_edge();
    return 0.5 * (std::erf(shift / std::sqrt(2.0 * sigma_q_sq)) + 1.0);
}

double c2_central(double sigma_q_sq, const AdcConfig& cfg) {
    require_positive_variance(sigma_q_sq, "c2_central");
    cfg.validate();
    return std::erf(cfg.bin_width() / (2.0 * std::sqrt(2.0 * sigma_q_sq)));
}

MinEntropyResult conditional_min_entropy(double sigma_q_sq, const ClassicalBound& bound,
                                         const AdcConfig& cfg) {
    if (bound.e_max < 0.0 || bound.delta_max < 0.0) {
        throw DomainError("classical bound: e_max and delta_max must be >= 0");
    }
    MinEntropyResult r;
    r.c1 = c1_boundary(sigma_q_sq, bound, cfg);
    r.c2 = c2_central(sigma_q_sq, cfg);
    r.appropriate_range = r.c1 <= r.c2;
    // No distribution over 2^n codes carries more than n bits.
    r.h_min = std::min(-std::log2(std::max(r.c1, r.c2)), static_cast<double>(cfg.bits));
    return r;
}

double effective_quantum_variance(const NoiseBudget& budget, const AdcConfig& cfg,
                                  const QuantizationPolicy& policy) {
    const double q = budget.sigma_m_sq - budget.sigma_e_sq - budget.sigma_lo_amp_sq -
                     quantization_correction(cfg, policy);
    if (!(q > 0.0)) {
        throw CalibrationError(
            "derived quantum variance is not positive (" + std::to_string(q) +
            " V^2): measured noise is fully explained by electronic, LO and quantization noise");
    }
    return q;
}

double practical_min_entropy(const NoiseBudget& budget, const AdcConfig& cfg,
                             const QuantizationPolicy& policy) {
    cfg.validate();
    const double q = effective_quantum_variance(budget, cfg, policy);
    return -std::log2(std::erf(cfg.bin_width() / (2.0 * std::sqrt(2.0 * q))));
}

double range_for_target_entropy(const NoiseBudget& budget, int bits,
                                const QuantizationPolicy& policy, double target_h) {
    if (!(target_h > 0.0)) throw DomainError("target entropy must be > 0");
    AdcConfig probe;
    probe.bits = bits;

    // h(R) is strictly decreasing; h = +inf would need R -> 0, and for
    // delta-dependent corrections large R eventually throws.
    const auto h_at = [&](double r, bool& valid) {
        probe.range_r = r;
        try {
            valid = true;
            return practical_min_entropy(budget, probe, policy);
        } catch (const CalibrationError&) {
            valid = false;
            return 0.0;
        }
    };

    const double q0 = budget.sigma_m_sq - budget.sigma_e_sq - budget.sigma_lo_amp_sq;
    if (!(q0 > 0.0)) throw CalibrationError("budget leaves no quantum variance");
    double lo = std::ldexp(std::sqrt(2.0 * q0), bits + 1);  // erf argument ~ 1
    double hi = lo;
    bool valid = false;
    for (int i = 0; i < 400; ++i) {
        const double h = h_at(lo, valid);
        if (valid && h > target_h) break;
        lo *= 0.5;
    }
    for (int i = 0; i < 400; ++i) {
        const double h = h_at(hi, valid);
        if (!valid || h < target_h) break;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double h = h_at(mid, valid);
        if (valid && h > target_h) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace {

struct GaussLegendre20 {
    std::array<double, 20> nodes{};
    std::array<double, 20> weights{};

    GaussLegendre20() {
        constexpr int n = 20;
        for (int i = 0; i < n; ++i) {
            // Newton iteration on P_n from the Chebyshev-like initial guess.
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

const GaussLegendre20& gauss_legendre() {
    static const GaussLegendre20 rule;
    return rule;
}

// Integral of the standard normal density over [lo, hi] (standardized units).
double normal_mass(double lo, double hi) {
    constexpr double kCut = 40.0;  // density below 1e-347 beyond this
    lo = std::max(lo, -kCut);
    hi = std::min(hi, kCut);
    if (!(hi > lo)) return 0.0;
    const auto& gl = gauss_legendre();
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    const int pieces = static_cast<int>(std::ceil((hi - lo) / 0.25));
    const double h = (hi - lo) / pieces;
    double total = 0.0;
    for (int p = 0; p < pieces; ++p) {
        const double a = lo + p * h;
        const double mid = a + 0.5 * h;
        double s = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double x = mid + 0.5 * h * gl.nodes[i];
            s += gl.weights[i] * std::exp(-0.5 * x * x);
        }
        total += 0.5 * h * s;
    }
    return total * inv_sqrt_2pi;
}

}  // namespace

std::vector<double> brute_force_bin_masses(double mean, double sigma, const AdcConfig& cfg) {
    if (!(sigma > 0.0)) throw DomainError("brute_force_bin_masses: sigma must be > 0");
    cfg.validate();
    const double d = cfg.bin_width();
    const std::uint32_t count = cfg.code_count();
    std::vector<double> masses(count);
    const auto z = [&](double v) { return (v - mean) / sigma; };
    const double inf = std::numeric_limits<double>::infinity();
    for (std::uint32_t k = 0; k < count; ++k) {
        const double c = cfg.bin_center(k);
        const double lo = (k == 0) ? -inf : z(c - 0.5 * d);
        const double hi = (k == count - 1) ? inf : z(c + 0.5 * d);
        masses[k] = normal_mass(lo, hi);
    }
    return masses;
}

double brute_force_max_prob(double sigma, const AdcConfig& cfg) {
    const auto masses = brute_force_bin_masses(0.0, sigma, cfg);
    return *std::max_element(masses.begin(), masses.end());
}

}  // namespace qrng
