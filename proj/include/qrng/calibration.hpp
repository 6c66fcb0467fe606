#pragma once

#include "qrng/adc.hpp"
#include "qrng/entropy.hpp"
#include "qrng/optics.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qrng {

// LO monitoring tap: a fraction of the LO goes to a power meter, and the
// main-path variance is multiple_k times the monitored variance.
struct MonitorTap {
    double nominal_ratio = 0.1;
    double multiple_k = 9.85;

    void validate() const;

    // Ideal splitter: k = (1 - r) / r.
    static MonitorTap ideal(double ratio);
};

double lo_variance_from_monitor(double sigma_mon_sq, const MonitorTap& tap);

// Measured inputs. Provide sigma_mon_sq (monitor power variance, converted
// through the tap and the chain) or sigma_lo_amp_sq (amplified LO variance
// already in V^2); the latter wins if both are set.
struct MeasuredVariances {
    double sigma_m_sq = 0.0;
    double sigma_e_sq = 0.0;
    std::optional<double> sigma_mon_sq;
    std::optional<double> sigma_lo_amp_sq;
};

struct CalibrationReport {
    double sigma_lo_sq = 0.0;  // main-path LO variance from the monitor (0 if supplied directly)
    NoiseBudget budget;        // sigma_q_amp_sq = sigma_m - sigma_e - sigma'_LO
    double quantization_correction = 0.0;
    double sigma_q_eff_sq = 0.0;  // what remains after the quantization correction too
    double h_with_monitoring = 0.0;
    double h_without_monitoring = 0.0;
    double cmrr_db = 0.0;
    MinEntropyResult boundary_check;  // c1/c2 at sigma_q_eff_sq
    AdcConfig adc;
    QuantizationPolicy policy;
    bool range_inverted = false;  // adc.range_r was solved for a target entropy
    std::optional<double> target_h;

    // Flat "key=value" lines.
    std::string to_report() const;
};

struct CalibrationOptions {
    ClassicalBound bound;
    // Solve the ADC span so that h_with_monitoring equals this value.
    std::optional<double> target_h;
};

CalibrationReport calibrate(const MeasuredVariances& measured, const OpticalChain& chain,
                            const MonitorTap& tap, const AdcConfig& cfg,
                            const QuantizationPolicy& policy, const CalibrationOptions& options = {});

struct TransmittanceRow {
    double t = 0.0;
    double a = 0.0;
    double b = 0.0;
    double sigma_lo_amp_sq = 0.0;
    double sigma_q_amp_sq = 0.0;
    double sigma_m_sq = 0.0;
};

// Lossless symmetric splitter, eta1 = eta2 = 1, no electronic noise.
std::vector<TransmittanceRow> sweep_transmittance(std::span<const double> t_values,
                                                  double sigma_lo_sq, double sigma_q_sq,
                                                  double gain, double power);

struct PowerRow {
    double power = 0.0;
    double sigma_m_sq = 0.0;
};

std::vector<PowerRow> sweep_power(std::span<const double> p_values, const OpticalChain& chain,
                                  double sigma_lo_sq, double sigma_q_sq, double sigma_e_sq);

struct CmrrRow {
    std::string label;
    double cmrr_db = 0.0;
    double classical_fraction = 0.0;  // sigma'_LO^2 / sigma_M^2
    double h_with = 0.0;
    double h_without = 0.0;
    double gap() const { return h_without - h_with; }
};

struct LabeledChain {
    std::string label;
    OpticalChain chain;
};

// Rows in input order. Requires a > 0 for every chain.
std::vector<CmrrRow> sweep_cmrr(std::span<const LabeledChain> chains, double sigma_lo_sq,
                                double sigma_q_sq, double sigma_e_sq, const AdcConfig& cfg,
                                const QuantizationPolicy& policy = {});

std::string to_csv(std::span<const TransmittanceRow> rows);
std::string to_csv(std::span<const PowerRow> rows);
std::string to_csv(std::span<const CmrrRow> rows);

}  // namespace qrng
