// qrngbench: simulate, calibrate, sweep, extract and test from the shell.

#include "qrng/workbench.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Workbench for vacuum-fluctuation QRNG security calibration"};
    app.require_subcommand(1);

    qrng::SimulateArgs sim;
    std::uint64_t count = 0;
    std::uint64_t seed = 0;
    std::string csv;
    auto* simulate = app.add_subcommand("simulate", "Generate quantized homodyne samples");
    simulate->add_option("--config", sim.config, "Workbench JSON config")->required();
    simulate->add_option("--out", sim.out, "Sample file (a .meta sidecar is written beside it)")
        ->required();
    auto* count_opt = simulate->add_option("--count", count, "Number of samples");
    auto* seed_opt = simulate->add_option("--seed", seed, "64-bit simulation seed");
    auto* csv_opt = simulate->add_option("--csv", csv, "Also write index,analog,code rows");

    qrng::CalibrateArgs cal;
    auto* calibrate = app.add_subcommand("calibrate", "Practical min-entropy from measured variances");
    calibrate->add_option("--config", cal.config, "Workbench JSON config")->required();
    calibrate->add_option("--measured", cal.measured, "key=value measured variances")->required();
    calibrate->add_option("--out", cal.out, "Report file (stdout if omitted)");

    qrng::SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Emit a parameter sweep as CSV");
    sweep->add_option("--kind", sw.kind, "transmittance, power or cmrr")->required();
    sweep->add_option("--config", sw.config, "Workbench JSON config")->required();
    sweep->add_option("--out", sw.out, "CSV file (stdout if omitted)");

    qrng::ExtractArgs ex;
    double ratio = 0.0;
    auto* extract = app.add_subcommand("extract", "Toeplitz-hash a sample file");
    extract->add_option("--in", ex.input, "Sample file")->required();
    extract->add_option("--seed-file", ex.seed_file, "Hex Toeplitz seed")->required();
    extract->add_option("--config", ex.config, "Workbench JSON config")->required();
    extract->add_option("--out", ex.out, "Packed output bits")->required();
    auto* ratio_opt = extract->add_option("--ratio", ratio, "Extraction ratio m_out/n_in");

    qrng::TestArgs ts;
    std::string test_out;
    auto* test = app.add_subcommand("test", "Run the statistical battery on a packed bit file");
    test->add_option("bits", ts.bits, "Packed bit file (LSB-first)")->required();
    auto* test_out_opt = test->add_option("--out", test_out, "Also write the report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : qrng::kExitConfig;
    }

    if (*simulate) {
        if (*count_opt) sim.count = count;
        if (*seed_opt) sim.seed = seed;
        if (*csv_opt) sim.csv = csv;
        return qrng::cmd_simulate(sim, std::cerr);
    }
    if (*calibrate) return qrng::cmd_calibrate(cal, std::cout);
    if (*sweep) return qrng::cmd_sweep(sw, std::cout);
    if (*extract) {
        if (*ratio_opt) ex.ratio = ratio;
        return qrng::cmd_extract(ex, std::cerr);
    }
    if (*test_out_opt) ts.out = test_out;
    return qrng::cmd_test(ts, std::cout);
}
