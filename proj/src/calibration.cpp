#include "qrng/calibration.hpp"

#include "qrng/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qrng {

void MonitorTap::validate() const {
    if (!(multiple_k > 0.0)) throw DomainError("monitor: multiple_k must be > 0");
    if (!(nominal_ratio > 0.0 && nominal_ratio < 1.0)) {
        throw DomainError("monitor: nominal_ratio must lie in (0, 1)");
    }
}

MonitorTap MonitorTap::ideal(double ratio) {
    MonitorTap tap;
    tap.nominal_ratio = ratio;
    tap.multiple_k = (1.0 - ratio) / ratio;
    tap.validate();
    return tap;
}

double lo_variance_from_monitor(double sigma_mon_sq, const MonitorTap& tap) {
    tap.validate();
    if (!(sigma_mon_sq >= 0.0)) throw DomainError("monitor variance must be >= 0");
    return tap.multiple_k * sigma_mon_sq;
}

CalibrationReport calibrate(const MeasuredVariances& measured, const OpticalChain& chain,
                            const MonitorTap& tap, const AdcConfig& cfg,
                            const QuantizationPolicy& policy, const CalibrationOptions& options) {
    if (!(measured.sigma_m_sq >= 0.0) || !(measured.sigma_e_sq >= 0.0)) {
        throw DomainError("calibrate: measured variances must be >= 0");
    }
    if (!measured.sigma_mon_sq && !measured.sigma_lo_amp_sq) {
        throw DomainError("calibrate: need sigma_mon_sq or sigma_lo_amp_sq");
    }
    const auto coeffs = imbalance_coefficients(chain);

    CalibrationReport rep;
    rep.policy = policy;
    rep.cmrr_db = cmrr_db(coeffs);
    rep.target_h = options.target_h;

    NoiseBudget& nb = rep.budget;
    nb.sigma_m_sq = measured.sigma_m_sq;
    nb.sigma_e_sq = measured.sigma_e_sq;
    if (measured.sigma_lo_amp_sq) {
        if (!(*measured.sigma_lo_amp_sq >= 0.0)) throw DomainError("sigma_lo_amp_sq must be >= 0");
        nb.sigma_lo_amp_sq = *measured.sigma_lo_amp_sq;
    } else {
        rep.sigma_lo_sq = lo_variance_from_monitor(*measured.sigma_mon_sq, tap);
        nb.sigma_lo_amp_sq =
            4.0 * coeffs.a * chain.gain * chain.gain * chain.power * rep.sigma_lo_sq;
    }
    nb.sigma_lo_sq = rep.sigma_lo_sq;
    nb.sigma_q_amp_sq = nb.sigma_m_sq - nb.sigma_e_sq - nb.sigma_lo_amp_sq;
    const double scale = 4.0 * coeffs.b * chain.gain * chain.gain * chain.power;
    nb.sigma_q_sq = scale > 0.0 ? std::max(nb.sigma_q_amp_sq, 0.0) / scale : 0.0;

    rep.adc = cfg;
    if (options.target_h) {
        rep.adc.range_r = range_for_target_entropy(nb, cfg.bits, policy, *options.target_h);
        rep.range_inverted = true;
    }
    rep.adc.validate();

    rep.quantization_correction = quantization_correction(rep.adc, policy);
    rep.sigma_q_eff_sq = effective_quantum_variance(nb, rep.adc, policy);
    rep.h_with_monitoring = practical_min_entropy(nb, rep.adc, policy);

    // Unmonitored: the LO contribution is silently counted as quantum noise.
    NoiseBudget naive = nb;
    naive.sigma_lo_amp_sq = 0.0;
    rep.h_without_monitoring = practical_min_entropy(naive, rep.adc, policy);

    rep.boundary_check = conditional_min_entropy(rep.sigma_q_eff_sq, options.bound, rep.adc);
    return rep;
}

std::string CalibrationReport::to_report() const {
    std::string out;
    char line[160];
    const auto put = [&](const char* key, double v) {
        std::snprintf(line, sizeof line, "%s=%.10g\n", key, v);
        out += line;
    };
    put("sigma_lo_sq", sigma_lo_sq);
    put("sigma_m_sq", budget.sigma_m_sq);
    put("sigma_e_sq", budget.sigma_e_sq);
    put("sigma_lo_amp_sq", budget.sigma_lo_amp_sq);
    put("sigma_q_amp_sq", budget.sigma_q_amp_sq);
    put("quantization_correction", quantization_correction);
    out += "quantization_policy=" + to_string(policy.mode) + "\n";
    put("sigma_q_eff_sq", sigma_q_eff_sq);
    std::snprintf(line, sizeof line, "adc_bits=%d\n", adc.bits);
    out += line;
    put("adc_range_r", adc.range_r);
    out += std::string("adc_range_r_source=") + (range_inverted ? "inverted" : "configured") + "\n";
    if (target_h) put("target_h_min", *target_h);
    put("h_with_monitoring", h_with_monitoring);
    put("h_without_monitoring", h_without_monitoring);
    put("h_gap", h_without_monitoring - h_with_monitoring);
    if (std::isinf(cmrr_db)) {
        out += "cmrr_db=inf\n";
    } else {
        put("cmrr_db", cmrr_db);
    }
    put("c1", boundary_check.c1);
    put("c2", boundary_check.c2);
    out += std::string("c1_le_c2=") + (boundary_check.appropriate_range ? "true" : "false") + "\n";
    return out;
}

std::vector<TransmittanceRow> sweep_transmittance(std::span<const double> t_values,
                                                  double sigma_lo_sq, double sigma_q_sq,
                                                  double gain, double power) {
    std::vector<TransmittanceRow> rows;
    rows.reserve(t_values.size());
    for (double t : t_values) {
        const auto chain = OpticalChain::lossless_symmetric(t, gain, power);
        const auto k = imbalance_coefficients(chain);
        const auto nb = total_measurement_variance(chain, sigma_lo_sq, sigma_q_sq, 0.0);
        rows.push_back({t, k.a, k.b, nb.sigma_lo_amp_sq, nb.sigma_q_amp_sq, nb.sigma_m_sq});
    }
    return rows;
}

std::vector<PowerRow> sweep_power(std::span<const double> p_values, const OpticalChain& chain,
                                  double sigma_lo_sq, double sigma_q_sq, double sigma_e_sq) {
    std::vector<PowerRow> rows;
    rows.reserve(p_values.size());
    const auto k = imbalance_coefficients(chain);
    for (double p : p_values) {
        const auto nb =
            total_measurement_variance(k, chain.gain, p, sigma_lo_sq, sigma_q_sq, sigma_e_sq);
        rows.push_back({p, nb.sigma_m_sq});
    }
    return rows;
}

std::vector<CmrrRow> sweep_cmrr(std::span<const LabeledChain> chains, double sigma_lo_sq,
                                double sigma_q_sq, double sigma_e_sq, const AdcConfig& cfg,
                                const QuantizationPolicy& policy) {
    std::vector<CmrrRow> rows;
    rows.reserve(chains.size());
    for (const auto& lc : chains) {
        const auto k = imbalance_coefficients(lc.chain);
        if (!(k.a > 0.0)) {
            throw DomainError("sweep_cmrr: chain '" + lc.label + "' is perfectly balanced (a = 0)");
        }
        const auto nb = total_measurement_variance(lc.chain, sigma_lo_sq, sigma_q_sq, sigma_e_sq);
        NoiseBudget naive = nb;
        naive.sigma_lo_amp_sq = 0.0;
        CmrrRow row;
        row.label = lc.label;
        row.cmrr_db = cmrr_db(k);
        row.classical_fraction = nb.sigma_m_sq > 0.0 ? nb.sigma_lo_amp_sq / nb.sigma_m_sq : 0.0;
        row.h_with = practical_min_entropy(nb, cfg, policy);
        row.h_without = practical_min_entropy(naive, cfg, policy);
        rows.push_back(row);
    }
    return rows;
}

std::string to_csv(std::span<const TransmittanceRow> rows) {
    std::string out = "t,a,b,sigma_lo_amp_sq[V^2],sigma_q_amp_sq[V^2],sigma_m_sq[V^2]\n";
    char line[256];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.a, r.b,
                      r.sigma_lo_amp_sq, r.sigma_q_amp_sq, r.sigma_m_sq);
        out += line;
    }
    return out;
}

std::string to_csv(std::span<const PowerRow> rows) {
    std::string out = "P[W],sigma_m_sq[V^2]\n";
    char line[96];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", r.power, r.sigma_m_sq);
        out += line;
    }
    return out;
}

std::string to_csv(std::span<const CmrrRow> rows) {
    std::string out = "cmrr_db[dB],classical_fraction,h_with[bits],h_without[bits],gap[bits]\n";
    char line[256];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.cmrr_db,
                      r.classical_fraction, r.h_with, r.h_without, r.gap());
        out += line;
    }
    return out;
}

}  // namespace qrng
