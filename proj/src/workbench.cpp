#include "qrng/workbench.hpp"

#include "qrng/errors.hpp"
#include "qrng/io.hpp"
#include "qrng/stat_tests.hpp"
#include "qrng/toeplitz.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>
#include <thread>

namespace qrng {

using nlohmann::json;

namespace {

// Reads keys out of one JSON object and rejects anything left unread.
class Section {
public:
    Section(const json& root, std::string name) : name_(std::move(name)) {
        if (!root.contains(name_)) return;
        obj_ = &root.at(name_);
        if (!obj_->is_object()) throw ConfigError("config: section '" + name_ + "' must be an object");
    }
    Section(const json& obj, std::string name, bool) : name_(std::move(name)), obj_(&obj) {
        if (!obj_->is_object()) throw ConfigError("config: '" + name_ + "' must be an object");
    }

    template <typename T>
    void get(const char* key, T& dst) {
        seen_.insert(key);
        if (!obj_ || !obj_->contains(key)) return;
        try {
            dst = obj_->at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError("config: " + name_ + "." + key + " has the wrong type");
        }
    }

    template <typename T>
    void get(const char* key, std::optional<T>& dst) {
        seen_.insert(key);
        if (!obj_ || !obj_->contains(key) || obj_->at(key).is_null()) return;
        T v{};
        get(key, v);
        dst = v;
    }

    const json* raw(const char* key) {
        seen_.insert(key);
        if (!obj_ || !obj_->contains(key)) return nullptr;
        return &obj_->at(key);
    }

    void finish() const {
        if (!obj_) return;
        for (const auto& [k, v] : obj_->items()) {
            if (!seen_.count(k)) throw ConfigError("config: unknown key '" + name_ + "." + k + "'");
        }
    }

private:
    std::string name_;
    const json* obj_ = nullptr;
    std::set<std::string> seen_;
};

void read_chain(Section& s, OpticalChain& c) {
    s.get("t13", c.t13);
    s.get("t24", c.t24);
    s.get("r23", c.r23);
    s.get("r14", c.r14);
    s.get("eta1", c.eta1);
    s.get("eta2", c.eta2);
    s.get("gain", c.gain);
    s.get("power", c.power);
    s.get("phase", c.phase);
}

}  // namespace

void WorkbenchConfig::validate() const {
    chain.validate();
    if (!(sigma_lo_sq >= 0.0) || !(sigma_q_sq >= 0.0) || !(sigma_e_sq >= 0.0)) {
        throw DomainError("noise: variances must be >= 0");
    }
    adc.validate();
    if (quantization.measured_variance && !(*quantization.measured_variance >= 0.0)) {
        throw DomainError("adc: quantization_variance must be >= 0");
    }
    monitor.validate();
    if (extractor.m_out < 1 || extractor.m_out >= extractor.n_in) {
        throw DomainError("extractor: need 1 <= m_out < n_in");
    }
    if (extractor.bits_per_sample < 1 || extractor.bits_per_sample > 16) {
        throw DomainError("extractor: bits_per_sample must be in [1, 16]");
    }
    if (!(extractor.h_min_per_sample >= 0.0)) {
        throw DomainError("extractor: h_min_per_sample must be >= 0");
    }
    if (bound.e_max < 0.0 || bound.delta_max < 0.0) {
        throw DomainError("bound: e_max and delta_max must be >= 0");
    }
    if (target_h_min && !(*target_h_min > 0.0)) {
        throw DomainError("calibration: target_h_min must be > 0");
    }
    for (const auto& lc : sweep.chains) lc.chain.validate();
    if (!(dc_power >= 0.0)) throw DomainError("simulation: dc_power must be >= 0");
    if (sample_count < 1) throw DomainError("simulation: sample_count must be >= 1");
}

SimConfig WorkbenchConfig::sim_config() const {
    SimConfig s;
    s.chain = chain;
    s.sigma_lo_sq = sigma_lo_sq;
    s.sigma_q_sq = sigma_q_sq;
    s.sigma_e_sq = sigma_e_sq;
    s.dc_power = dc_power;
    s.sample_count = sample_count;
    s.seed = seed;
    s.shape = shape;
    return s;
}

WorkbenchConfig parse_workbench_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config: top level must be an object");

    static const std::set<std::string> sections = {"chain",     "noise",  "adc",         "simulation",
                                                   "monitor",   "extractor", "bound",   "calibration",
                                                   "sweep"};
    for (const auto& [k, v] : root.items()) {
        if (!sections.count(k)) throw ConfigError("config: unknown section '" + k + "'");
    }

    WorkbenchConfig cfg;
    {
        Section s(root, "chain");
        read_chain(s, cfg.chain);
        s.finish();
    }
    {
        Section s(root, "noise");
        s.get("sigma_lo_sq", cfg.sigma_lo_sq);
        s.get("sigma_q_sq", cfg.sigma_q_sq);
        s.get("sigma_e_sq", cfg.sigma_e_sq);
        std::string shape = to_string(cfg.shape);
        s.get("shape", shape);
        cfg.shape = parse_noise_shape(shape);
        s.finish();
    }
    {
        Section s(root, "adc");
        s.get("bits", cfg.adc.bits);
        s.get("range_r", cfg.adc.range_r);
        s.get("offset", cfg.adc.offset);
        std::string mode = to_string(cfg.quantization.mode);
        s.get("quantization", mode);
        cfg.quantization.mode = parse_quantization_mode(mode);
        s.get("quantization_variance", cfg.quantization.measured_variance);
        s.finish();
    }
    {
        Section s(root, "simulation");
        s.get("dc_power", cfg.dc_power);
        s.get("sample_count", cfg.sample_count);
        s.get("seed", cfg.seed);
        s.finish();
    }
    {
        Section s(root, "monitor");
        s.get("nominal_ratio", cfg.monitor.nominal_ratio);
        s.get("multiple_k", cfg.monitor.multiple_k);
        s.finish();
    }
    {
        Section s(root, "extractor");
        s.get("n_in", cfg.extractor.n_in);
        s.get("m_out", cfg.extractor.m_out);
        s.get("h_min_per_sample", cfg.extractor.h_min_per_sample);
        s.get("bits_per_sample", cfg.extractor.bits_per_sample);
        s.finish();
    }
    {
        Section s(root, "bound");
        s.get("e_max", cfg.bound.e_max);
        s.get("delta_max", cfg.bound.delta_max);
        s.finish();
    }
    {
        Section s(root, "calibration");
        s.get("target_h_min", cfg.target_h_min);
        s.finish();
    }
    {
        Section s(root, "sweep");
        s.get("t_values", cfg.sweep.t_values);
        s.get("p_values", cfg.sweep.p_values);
        if (const json* chains = s.raw("chains")) {
            if (!chains->is_array()) throw ConfigError("config: sweep.chains must be an array");
            for (const auto& entry : *chains) {
                Section cs(entry, "sweep.chains[]", true);
                LabeledChain lc;
                lc.chain = cfg.chain;
                cs.get("label", lc.label);
                cs.get("t13", lc.chain.t13);
                cs.get("r14", lc.chain.r14);
                cs.get("r23", lc.chain.r23);
                cs.get("t24", lc.chain.t24);
                cs.finish();
                cfg.sweep.chains.push_back(lc);
            }
        }
        s.finish();
    }
    cfg.validate();
    return cfg;
}

WorkbenchConfig load_workbench_config(const std::filesystem::path& path) {
    return parse_workbench_config(read_file_text(path));
}

MeasuredVariances parse_measured_variances(const std::string& text) {
    MeasuredVariances m;
    bool have_m = false, have_e = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        const auto eq = tok.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("measured: line " + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = tok.substr(0, eq);
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(tok.substr(eq + 1), &used);
            if (used != tok.size() - eq - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ConfigError("measured: line " + std::to_string(lineno) + ": bad number for " + key);
        }
        if (key == "sigma_m_sq") {
            m.sigma_m_sq = value;
            have_m = true;
        } else if (key == "sigma_e_sq") {
            m.sigma_e_sq = value;
            have_e = true;
        } else if (key == "sigma_mon_sq") {
            m.sigma_mon_sq = value;
        } else if (key == "sigma_lo_amp_sq") {
            m.sigma_lo_amp_sq = value;
        } else {
            throw ConfigError("measured: unknown key '" + key + "'");
        }
    }
    if (!have_m || !have_e) throw ConfigError("measured: sigma_m_sq and sigma_e_sq are required");
    if (!m.sigma_mon_sq && !m.sigma_lo_amp_sq) {
        throw ConfigError("measured: need sigma_mon_sq or sigma_lo_amp_sq");
    }
    return m;
}

std::filesystem::path resolve_output(const std::filesystem::path& path) {
    if (path.is_absolute()) return path;
    if (const char* dir = std::getenv("QRNG_OUT_DIR"); dir && *dir) {
        return std::filesystem::path(dir) / path;
    }
    return path;
}

namespace {

// Loads and validates the config, mapping failures onto exit 2.
std::optional<WorkbenchConfig> load_or_report(const std::filesystem::path& path, std::ostream& log,
                                              int& code) {
    try {
        return load_workbench_config(path);
    } catch (const IoError& e) {
        log << "error: " << e.what() << "\n";
        code = kExitIo;
    } catch (const std::exception& e) {
        log << "config error: " << e.what() << "\n";
        code = kExitConfig;
    }
    return std::nullopt;
}

}  // namespace

int cmd_simulate(const SimulateArgs& args, std::ostream& log) {
    int code = kExitOk;
    auto cfg = load_or_report(args.config, log, code);
    if (!cfg) return code;
    if (args.count) cfg->sample_count = *args.count;
    if (args.seed) cfg->seed = *args.seed;
    try {
        cfg->validate();
    } catch (const std::exception& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        const auto out = resolve_output(args.out);
        AtomicFileWriter samples(out);
        std::optional<AtomicFileWriter> csv;
        if (args.csv) {
            csv.emplace(resolve_output(*args.csv));
            csv->write("index,analog[V],code\n");
        }
        std::vector<std::uint16_t> codes;
        std::vector<std::uint8_t> bytes;
        std::string rows;
        simulate_stream(cfg->sim_config(), [&](std::uint64_t first, std::span<const double> chunk) {
            quantize_into(chunk, cfg->adc, codes);
            bytes.clear();
            append_codes_le(bytes, codes);
            samples.write(bytes);
            if (csv) {
                rows.clear();
                char line[96];
                for (std::size_t i = 0; i < chunk.size(); ++i) {
                    std::snprintf(line, sizeof line, "%llu,%.17g,%u\n",
                                  static_cast<unsigned long long>(first + i), chunk[i],
                                  static_cast<unsigned>(codes[i]));
                    rows += line;
                }
                csv->write(rows);
            }
        });
        samples.commit();
        write_file_atomic(sidecar_path(out), format_sidecar(cfg->adc, cfg->sample_count));
        if (csv) csv->commit();
        log << "wrote " << cfg->sample_count << " samples to " << out.string() << "\n";
    } catch (const IoError& e) {
        log << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

int cmd_calibrate(const CalibrateArgs& args, std::ostream& log) {
    int code = kExitOk;
    auto cfg = load_or_report(args.config, log, code);
    if (!cfg) return code;

    MeasuredVariances measured;
    try {
        measured = parse_measured_variances(read_file_text(args.measured));
    } catch (const IoError& e) {
        log << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    CalibrationReport rep;
    try {
        CalibrationOptions opts;
        opts.bound = cfg->bound;
        opts.target_h = cfg->target_h_min;
        rep = calibrate(measured, cfg->chain, cfg->monitor, cfg->adc, cfg->quantization, opts);
    } catch (const CalibrationError& e) {
        log << "insecure: " << e.what() << "\n";
        return kExitSecurity;
    } catch (const DomainError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    const std::string text = rep.to_report();
    if (args.out.empty()) {
        log << text;
        return kExitOk;
    }
    try {
        write_file_atomic(resolve_output(args.out), text);
    } catch (const IoError& e) {
        log << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

int cmd_sweep(const SweepArgs& args, std::ostream& log) {
    if (args.kind != "transmittance" && args.kind != "power" && args.kind != "cmrr") {
        log << "config error: unknown sweep kind '" << args.kind
            << "' (expected transmittance, power or cmrr)\n";
        return kExitConfig;
    }
    int code = kExitOk;
    auto cfg = load_or_report(args.config, log, code);
    if (!cfg) return code;

    std::string csv;
    try {
        if (args.kind == "transmittance") {
            csv = to_csv(sweep_transmittance(cfg->sweep.t_values, cfg->sigma_lo_sq, cfg->sigma_q_sq,
                                             cfg->chain.gain, cfg->chain.power));
        } else if (args.kind == "power") {
            csv = to_csv(sweep_power(cfg->sweep.p_values, cfg->chain, cfg->sigma_lo_sq,
                                     cfg->sigma_q_sq, cfg->sigma_e_sq));
        } else {
            std::vector<LabeledChain> chains = cfg->sweep.chains;
            if (chains.empty()) {
                for (const auto& row : measured_coupling_table()) {
                    chains.push_back({row.label, row.apply_to(cfg->chain)});
                }
            }
            csv = to_csv(sweep_cmrr(chains, cfg->sigma_lo_sq, cfg->sigma_q_sq, cfg->sigma_e_sq,
                                    cfg->adc, cfg->quantization));
        }
    } catch (const CalibrationError& e) {
        log << "insecure: " << e.what() << "\n";
        return kExitSecurity;
    } catch (const DomainError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    if (args.out.empty()) {
        log << csv;
        return kExitOk;
    }
    try {
        write_file_atomic(resolve_output(args.out), csv);
    } catch (const IoError& e) {
        log << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

int cmd_extract(const ExtractArgs& args, std::ostream& log) {
    int code = kExitOk;
    auto cfg = load_or_report(args.config, log, code);
    if (!cfg) return code;

    ExtractorConfig ec;
    ec.n_in = cfg->extractor.n_in;
    ec.m_out = cfg->extractor.m_out;
    ec.h_min_per_sample = cfg->extractor.h_min_per_sample;
    ec.bits_per_sample = cfg->extractor.bits_per_sample;
    if (args.ratio) {
        if (!(*args.ratio > 0.0 && *args.ratio < 1.0)) {
            log << "config error: --ratio must lie in (0, 1)\n";
            return kExitConfig;
        }
        ec.m_out = static_cast<std::size_t>(std::llround(*args.ratio * static_cast<double>(ec.n_in)));
        if (ec.m_out < 1) ec.m_out = 1;
    }

    // The guard runs before anything is read or written.
    try {
        ec.check_security();
    } catch (const SecurityError& e) {
        log << "insecure: " << e.what() << "\n";
        return kExitSecurity;
    }

    SampleFile samples;
    try {
        ec.seed = parse_hex_seed(read_file_text(args.seed_file), ec.seed_bits());
        ec.validate();
    } catch (const IoError& e) {
        log << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        samples = read_sample_file(args.input);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitIo;
    }
    if (samples.adc.bits != ec.bits_per_sample) {
        log << "config error: samples carry " << samples.adc.bits
            << " bits but extractor.bits_per_sample is " << ec.bits_per_sample << "\n";
        return kExitConfig;
    }

    const BitVector bits = extract_stream(samples.codes, ec, samples.adc.bits,
                                          std::max(1u, std::thread::hardware_concurrency()));
    try {
        write_file_atomic(resolve_output(args.out), bits.to_bytes());
    } catch (const IoError& e) {
        log << "error: " << e.what() << "\n";
        return kExitIo;
    }
    log << "extracted " << bits.size() << " bits from " << samples.codes.size() << " samples\n";
    return kExitOk;
}

int cmd_test(const TestArgs& args, std::ostream& log) {
    BitVector bits;
    try {
        bits = BitVector::from_bytes(read_file_bytes(args.bits));
    } catch (const IoError& e) {
        log << "error: " << e.what() << "\n";
        return kExitIo;
    }
    std::vector<TestResult> results;
    try {
        results = run_battery(bits);
    } catch (const InsufficientDataError& e) {
        log << "error: " << e.what() << "\n";
        return kExitFailed;
    }
    const std::string text = format_results(results);
    log << text;
    if (args.out) {
        try {
            write_file_atomic(resolve_output(*args.out), text);
        } catch (const IoError& e) {
            log << "error: " << e.what() << "\n";
            return kExitIo;
        }
    }
    for (const auto& r : results) {
        if (!r.pass) return kExitFailed;
    }
    return kExitOk;
}

}  // namespace qrng
