#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace qrng {

// Homodyne detection chain: beam-splitter power fractions, photodiode
// responsivities, trans-impedance gain, LO power and LO/signal phase.
struct OpticalChain {
    double t13 = 0.5;
    double t24 = 0.5;
    double r23 = 0.5;
    double r14 = 0.5;
    double eta1 = 1.0;   // A/W
    double eta2 = 1.0;   // A/W
    double gain = 1.0;   // V/A
    double power = 1.0;  // W
    double phase = 0.0;  // rad

    // Throws DomainError naming the first violated invariant.
    void validate() const;

    // eta1 = eta2 = 1, t13 = t24 = t, r14 = r23 = 1 - t.
    static OpticalChain lossless_symmetric(double t, double gain = 1.0, double power = 1.0);
};

struct ImbalanceCoefficients {
    double alpha = 0.0;  // eta1*t13 - eta2*r14
    double beta = 0.0;   // eta1*sqrt(t13*r23) + eta2*sqrt(t24*r14)
    double a = 0.0;      // alpha^2
    double b = 0.0;      // beta^2
};

// Variances of the detection chain. The *_amp_sq and sigma_m_sq fields are
// in V^2; sigma_lo_sq and sigma_q_sq are normalized quadrature units.
struct NoiseBudget {
    double sigma_lo_sq = 0.0;
    double sigma_q_sq = 0.0;
    double sigma_e_sq = 0.0;
    double sigma_lo_amp_sq = 0.0;
    double sigma_q_amp_sq = 0.0;
    double sigma_m_sq = 0.0;
};

ImbalanceCoefficients imbalance_coefficients(const OpticalChain& chain);

// Fills every field of the budget. sigma_m_sq is formed as the sum of the
// three parts so the decomposition identity holds bit-exactly.
NoiseBudget total_measurement_variance(const OpticalChain& chain, double sigma_lo_sq,
                                       double sigma_q_sq, double sigma_e_sq);

// Same, from precomputed coefficients plus gain and power.
NoiseBudget total_measurement_variance(const ImbalanceCoefficients& coeffs, double gain,
                                       double power, double sigma_lo_sq, double sigma_q_sq,
                                       double sigma_e_sq);

// 10*log10(b/a). Returns +infinity when a == 0.
double cmrr_db(const ImbalanceCoefficients& coeffs);

/// One measured beam splitter: port fractions exactly as tabulated.
struct CouplingRow {
    std::string label;  // nominal coupling ratio, e.g. "60/40"
    double t13 = 0.0;
    double r14 = 0.0;
    double r23 = 0.0;
    double t24 = 0.0;

    // Chain using this splitter with the optical/electrical settings of `base`.
    OpticalChain apply_to(const OpticalChain& base) const;
};

// The three measured splitters (50/50, 60/40, 70/30), compiled in.
const std::vector<CouplingRow>& measured_coupling_table();

// Measured photodiode responsivities (A/W) accompanying the table.
inline constexpr double kMeasuredEta1 = 0.584;
inline constexpr double kMeasuredEta2 = 0.561;

// Parses the bundled text format: '#' comments, then rows of
// "<label> <t13%> <r14%> <r23%> <t24%>".
std::vector<CouplingRow> load_coupling_table(const std::filesystem::path& path);

}  // namespace qrng
