#include "qrng/stat_tests.hpp"

#include "qrng/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace qrng {

namespace {

constexpr std::size_t kMinBits = 100;

void require_bits(const BitVector& bits, const char* test) {
    if (bits.size() < kMinBits) {
        throw InsufficientDataError(std::string(test) + ": need at least 100 bits, got " +
                                    std::to_string(bits.size()));
    }
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TestResult make_result(std::string name, double p_value) {
    p_value = std::clamp(p_value, 0.0, 1.0);
    return {std::move(name), p_value, p_value >= kPassLow && p_value <= kPassHigh};
}

TestResult monobit_frequency(const BitVector& bits) {
    require_bits(bits, "monobit");
    const double n = static_cast<double>(bits.size());
    const double s = 2.0 * static_cast<double>(bits.popcount()) - n;
    return make_result("monobit", std::erfc(std::abs(s) / std::sqrt(2.0 * n)));
}

TestResult block_frequency(const BitVector& bits, std::size_t block_len) {
    require_bits(bits, "block_frequency");
    if (block_len < 1 || block_len > bits.size()) {
        throw InsufficientDataError("block_frequency: block length must be in [1, n]");
    }
    const std::size_t blocks = bits.size() / block_len;
    double chi = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        std::size_t ones = 0;
        for (std::size_t j = 0; j < block_len; ++j) ones += bits.get(b * block_len + j);
        const double pi = static_cast<double>(ones) / static_cast<double>(block_len) - 0.5;
        chi += pi * pi;
    }
    chi *= 4.0 * static_cast<double>(block_len);
    const double p = boost::math::gamma_q(static_cast<double>(blocks) / 2.0, chi / 2.0);
    return make_result("block_frequency", p);
}

TestResult runs(const BitVector& bits) {
    require_bits(bits, "runs");
    const std::size_t n = bits.size();
    const double nd = static_cast<double>(n);
    const double pi = static_cast<double>(bits.popcount()) / nd;
    // Frequency prerequisite: the runs statistic is meaningless for a biased sequence.
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(nd)) return make_result("runs", 0.0);

    std::size_t v = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) v += bits.get(k) != bits.get(k + 1);
    const double num = std::abs(static_cast<double>(v) - 2.0 * nd * pi * (1.0 - pi));
    const double den = 2.0 * std::sqrt(2.0 * nd) * pi * (1.0 - pi);
    return make_result("runs", std::erfc(num / den));
}

TestResult cumulative_sums(const BitVector& bits) {
    require_bits(bits, "cumulative_sums");
    const std::size_t n = bits.size();
    long long s = 0;
    long long z = 0;
    for (std::size_t k = 0; k < n; ++k) {
        s += bits.get(k) ? 1 : -1;
        z = std::max(z, std::llabs(s));
    }
    const double nd = static_cast<double>(n);
    const double zd = static_cast<double>(z);
    const double sq = std::sqrt(nd);

    double sum1 = 0.0;
    for (long long k = static_cast<long long>(std::floor((-nd / zd + 1.0) / 4.0));
         k <= static_cast<long long>(std::floor((nd / zd - 1.0) / 4.0)); ++k) {
        sum1 += normal_cdf((4.0 * k + 1.0) * zd / sq) - normal_cdf((4.0 * k - 1.0) * zd / sq);
    }
    double sum2 = 0.0;
    for (long long k = static_cast<long long>(std::floor((-nd / zd - 3.0) / 4.0));
         k <= static_cast<long long>(std::floor((nd / zd - 1.0) / 4.0)); ++k) {
        sum2 += normal_cdf((4.0 * k + 3.0) * zd / sq) - normal_cdf((4.0 * k + 1.0) * zd / sq);
    }
    return make_result("cumulative_sums", 1.0 - sum1 + sum2);
}

std::vector<TestResult> run_battery(const BitVector& bits) {
    const std::size_t block_len = std::min<std::size_t>(128, bits.size());
    return {monobit_frequency(bits), block_frequency(bits, block_len), runs(bits),
            cumulative_sums(bits)};
}

std::string format_results(const std::vector<TestResult>& results) {
    std::string out;
    char line[128];
    for (const auto& r : results) {
        std::snprintf(line, sizeof line, "%s p=%.6f %s\n", r.test_name.c_str(), r.p_value,
                      r.pass ? "PASS" : "FAIL");
        out += line;
    }
    return out;
}

}  // namespace qrng
