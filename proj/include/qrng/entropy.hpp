#pragma once

#include "qrng/adc.hpp"
#include "qrng/optics.hpp"

#include <span>
#include <vector>

namespace qrng {

// Worst-case classical excursion and DC bias known to the adversary (V).
struct ClassicalBound {
    double e_max = 0.0;
    double delta_max = 0.0;
};

struct MinEntropyResult {
    double c1 = 0.0;  // mass of the clamped top bin under the worst-case bias
    double c2 = 0.0;  // mass of the central bin
    double h_min = 0.0;
    // c1 <= c2: the sampling range is wide enough that the central bin
    // bounds the guessing probability.
    bool appropriate_range = true;
};

// -log2(max p_i). Entries must be nonnegative and sum to 1 within 1e-9.
double min_entropy_discrete(std::span<const double> probabilities);

double c1_boundary(double sigma_q_sq, const ClassicalBound& bound, const AdcConfig& cfg);
double c2_central(double sigma_q_sq, const AdcConfig& cfg);

// -log2(max(c1, c2)), capped at the ADC bit depth.
MinEntropyResult conditional_min_entropy(double sigma_q_sq, const ClassicalBound& bound,
                                         const AdcConfig& cfg);

// sigma_m^2 - sigma_e^2 - sigma'_LO^2 - quantization correction. Throws
// CalibrationError when the result is not positive.
double effective_quantum_variance(const NoiseBudget& budget, const AdcConfig& cfg,
                                  const QuantizationPolicy& policy);

// Practical conditional min-entropy per sample from a measured budget.
double practical_min_entropy(const NoiseBudget& budget, const AdcConfig& cfg,
                             const QuantizationPolicy& policy);

// ADC span R for which practical_min_entropy(budget, {bits, R}, policy)
// equals target_h. Bisection; the quantization correction is re-evaluated
// at every trial R unless the policy carries a measured variance.
double range_for_target_entropy(const NoiseBudget& budget, int bits,
                                const QuantizationPolicy& policy, double target_h);

// Reference path: probability mass of every ADC bin (tails clamped into the
// end bins) for N(mean, sigma^2), by composite 20-point Gauss-Legendre
// quadrature of the density. Does not use erf.
std::vector<double> brute_force_bin_masses(double mean, double sigma, const AdcConfig& cfg);

// Largest bin mass for a zero-mean Gaussian.
double brute_force_max_prob(double sigma, const AdcConfig& cfg);

}  // namespace qrng
