#include "qrng/optics.hpp"

#include "qrng/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace qrng {

namespace {

void require_fraction(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError(std::string("optical chain: ") + name + " must lie in [0, 1], got " +
                          std::to_string(v));
    }
}

void require_nonnegative(double v, const char* name) {
    if (!(v >= 0.0)) {
        throw DomainError(std::string(name) + " must be >= 0, got " + std::to_string(v));
    }
}

}  // namespace

void OpticalChain::validate() const {
    require_fraction(t13, "t13");
    require_fraction(t24, "t24");
    require_fraction(r23, "r23");
    require_fraction(r14, "r14");
    // The splitter may lose power but never create it.
    if (t13 + r14 > 1.0 + 1e-12) {
        throw DomainError("optical chain: t13 + r14 must be <= 1");
    }
    if (t24 + r23 > 1.0 + 1e-12) {
        throw DomainError("optical chain: t24 + r23 must be <= 1");
    }
    if (!(eta1 > 0.0)) throw DomainError("optical chain: eta1 must be > 0");
    if (!(eta2 > 0.0)) throw DomainError("optical chain: eta2 must be > 0");
    if (!(gain > 0.0)) throw DomainError("optical chain: gain must be > 0");
    if (!(power >= 0.0)) throw DomainError("optical chain: power must be >= 0");
    if (!std::isfinite(phase)) throw DomainError("optical chain: phase must be finite");
}

OpticalChain OpticalChain::lossless_symmetric(double t, double gain, double power) {
    OpticalChain c;
    c.t13 = t;
    c.t24 = t;
    c.r14 = 1.0 - t;
    c.r23 = 1.0 - t;
    c.eta1 = 1.0;
    c.eta2 = 1.0;
    c.gain = gain;
    c.power = power;
    return c;
}

ImbalanceCoefficients imbalance_coefficients(const OpticalChain& chain) {
    chain.validate();
    ImbalanceCoefficients k;
    k.alpha = chain.eta1 * chain.t13 - chain.eta2 * chain.r14;
    k.beta = chain.eta1 * std::sqrt(chain.t13 * chain.r23) +
             chain.eta2 * std::sqrt(chain.t24 * chain.r14);
    k.a = k.alpha * k.alpha;
    k.b = k.beta * k.beta;
    return k;
}

NoiseBudget total_measurement_variance(const ImbalanceCoefficients& coeffs, double gain,
                                       double power, double sigma_lo_sq, double sigma_q_sq,
                                       double sigma_e_sq) {
    require_nonnegative(sigma_lo_sq, "sigma_lo_sq");
    require_nonnegative(sigma_q_sq, "sigma_q_sq");
    require_nonnegative(sigma_e_sq, "sigma_e_sq");
    require_nonnegative(power, "power");
    if (!(gain > 0.0)) throw DomainError("gain must be > 0");

    const double scale = 4.0 * gain * gain * power;
    NoiseBudget nb;
    nb.sigma_lo_sq = sigma_lo_sq;
    nb.sigma_q_sq = sigma_q_sq;
    nb.sigma_e_sq = sigma_e_sq;
    nb.sigma_lo_amp_sq = scale * coeffs.a * sigma_lo_sq;
    nb.sigma_q_amp_sq = scale * coeffs.b * sigma_q_sq;
    nb.sigma_m_sq = nb.sigma_lo_amp_sq + nb.sigma_q_amp_sq + nb.sigma_e_sq;
    return nb;
}

NoiseBudget total_measurement_variance(const OpticalChain& chain, double sigma_lo_sq,
                                       double sigma_q_sq, double sigma_e_sq) {
    return total_measurement_variance(imbalance_coefficients(chain), chain.gain, chain.power,
                                      sigma_lo_sq, sigma_q_sq, sigma_e_sq);
}

double cmrr_db(const ImbalanceCoefficients& coeffs) {
    if (coeffs.a == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(coeffs.b / coeffs.a);
}

OpticalChain CouplingRow::apply_to(const OpticalChain& base) const {
    OpticalChain c = base;
    c.t13 = t13;
    c.r14 = r14;
    c.r23 = r23;
    c.t24 = t24;
    return c;
}

const std::vector<CouplingRow>& measured_coupling_table() {
    static const std::vector<CouplingRow> rows = {
        {"50/50", 0.4878, 0.4771, 0.4893, 0.4852},
        {"60/40", 0.6125, 0.3826, 0.3844, 0.6138},
        {"70/30", 0.6982, 0.3017, 0.2817, 0.6349},
    };
    return rows;
}

std::vector<CouplingRow> load_coupling_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open coupling table: " + path.string());

    std::vector<CouplingRow> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        CouplingRow row;
        if (!(ss >> row.label)) continue;
        double pct[4];
        for (double& p : pct) {
            if (!(ss >> p)) {
                throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                                  ": expected four percentages after label");
            }
        }
        std::string extra;
        if (ss >> extra) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": trailing content '" + extra + "'");
        }
        row.t13 = pct[0] / 100.0;
        row.r14 = pct[1] / 100.0;
        row.r23 = pct[2] / 100.0;
        row.t24 = pct[3] / 100.0;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qrng
