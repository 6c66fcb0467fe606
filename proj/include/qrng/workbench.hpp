#pragma once

#include "qrng/adc.hpp"
#include "qrng/calibration.hpp"
#include "qrng/entropy.hpp"
#include "qrng/optics.hpp"
#include "qrng/simulator.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qrng {

// Exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailed = 1,    // statistical battery or generic failure
    kExitConfig = 2,
    kExitIo = 3,
    kExitSecurity = 4,  // insecure budget or over-extraction
};

struct ExtractorSettings {
    std::size_t n_in = 7680;
    std::size_t m_out = 768;
    double h_min_per_sample = 1.40;
    int bits_per_sample = 12;
};

struct SweepSettings {
    std::vector<double> t_values{0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> p_values{0.0, 0.5e-3, 1.0e-3, 1.066e-3, 1.5e-3, 2.0e-3};
    // Empty: the bundled measured coupling table applied to `chain`.
    std::vector<LabeledChain> chains;
};

// JSON document with optional sections chain, noise, adc, simulation,
// monitor, extractor, bound, calibration, sweep. Every key is checked; an
// unknown key is a ConfigError.
struct WorkbenchConfig {
    OpticalChain chain;
    double sigma_lo_sq = 0.0;
    double sigma_q_sq = 0.5;
    double sigma_e_sq = 0.0;
    NoiseShape shape = NoiseShape::Gaussian;
    AdcConfig adc;
    QuantizationPolicy quantization;
    double dc_power = 0.0;
    std::uint64_t sample_count = 1'000'000;
    std::uint64_t seed = 1;
    MonitorTap monitor;
    ExtractorSettings extractor;
    ClassicalBound bound;
    std::optional<double> target_h_min;
    SweepSettings sweep;

    void validate() const;
    SimConfig sim_config() const;
};

WorkbenchConfig parse_workbench_config(const std::string& json_text);
WorkbenchConfig load_workbench_config(const std::filesystem::path& path);

// "key=value" lines; '#' starts a comment. Keys: sigma_m_sq, sigma_e_sq,
// and sigma_mon_sq or sigma_lo_amp_sq.
MeasuredVariances parse_measured_variances(const std::string& text);

// Resolves a relative output path against $QRNG_OUT_DIR when that is set.
std::filesystem::path resolve_output(const std::filesystem::path& path);

struct SimulateArgs {
    std::filesystem::path config;
    std::filesystem::path out;
    std::optional<std::uint64_t> count;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> csv;
};

struct CalibrateArgs {
    std::filesystem::path config;
    std::filesystem::path measured;
    std::filesystem::path out;
};

struct SweepArgs {
    std::string kind;
    std::filesystem::path config;
    std::filesystem::path out;
};

struct ExtractArgs {
    std::filesystem::path input;
    std::filesystem::path seed_file;
    std::filesystem::path config;
    std::filesystem::path out;
    std::optional<double> ratio;
};

struct TestArgs {
    std::filesystem::path bits;
    std::optional<std::filesystem::path> out;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& log);
int cmd_calibrate(const CalibrateArgs& args, std::ostream& log);
int cmd_sweep(const SweepArgs& args, std::ostream& log);
int cmd_extract(const ExtractArgs& args, std::ostream& log);
int cmd_test(const TestArgs& args, std::ostream& log);

}  // namespace qrng
