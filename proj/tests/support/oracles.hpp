#pragma once

// Reference computations used only by the tests. Each one takes a route
// that shares no code with the library path it is compared against.

#include "qrng/bitvector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace qrng::oracle {

// Dense m x n Toeplitz matrix, T[i][j] = seed[m - 1 - i + j], one byte per entry.
inline std::vector<std::vector<std::uint8_t>> toeplitz_matrix(const std::vector<std::uint8_t>& seed,
                                                              std::size_t m, std::size_t n) {
    std::vector<std::vector<std::uint8_t>> t(m, std::vector<std::uint8_t>(n));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t[i][j] = seed[m - 1 - i + j];
    }
    return t;
}

inline std::vector<std::uint8_t> gf2_matvec(const std::vector<std::vector<std::uint8_t>>& t,
                                            const std::vector<std::uint8_t>& x) {
    std::vector<std::uint8_t> y(t.size(), 0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::uint8_t acc = 0;
        for (std::size_t j = 0; j < x.size(); ++j) acc ^= static_cast<std::uint8_t>(t[i][j] & x[j]);
        y[i] = acc;
    }
    return y;
}

// Same product without materializing the matrix (for the large cases).
inline std::vector<std::uint8_t> toeplitz_product(const std::vector<std::uint8_t>& seed,
                                                  std::size_t m, const std::vector<std::uint8_t>& x) {
    std::vector<std::uint8_t> y(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        const std::uint8_t* row = seed.data() + (m - 1 - i);
        std::uint8_t acc = 0;
        for (std::size_t j = 0; j < x.size(); ++j) acc ^= static_cast<std::uint8_t>(row[j] & x[j]);
        y[i] = acc;
    }
    return y;
}

inline std::vector<std::uint8_t> random_bytes_01(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::uint8_t> v(n);
    for (auto& b : v) b = static_cast<std::uint8_t>(rng() & 1u);
    return v;
}

inline BitVector to_bitvector(const std::vector<std::uint8_t>& bits01) {
    BitVector v(bits01.size());
    for (std::size_t i = 0; i < bits01.size(); ++i) v.set(i, bits01[i] != 0);
    return v;
}

inline std::vector<std::uint8_t> from_bitvector(const BitVector& v) {
    std::vector<std::uint8_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v.get(i) ? 1 : 0;
    return out;
}

// Maclaurin series of erf, converged to double precision for |x| <= 3.
inline double erf_series(double x) {
    double term = x;
    double sum = x;
    for (int k = 1; k < 200; ++k) {
        term *= -x * x / k;
        const double add = term / (2 * k + 1);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return 2.0 / std::sqrt(std::numbers::pi) * sum;
}

// Composite Simpson integral of the N(mean, sigma^2) density over [lo, hi].
inline double gaussian_mass_simpson(double mean, double sigma, double lo, double hi,
                                    int intervals = 200000) {
    lo = std::max(lo, mean - 40.0 * sigma);
    hi = std::min(hi, mean + 40.0 * sigma);
    if (!(hi > lo)) return 0.0;
    if (intervals % 2) ++intervals;
    const double h = (hi - lo) / intervals;
    const auto f = [&](double v) {
        const double z = (v - mean) / sigma;
        return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    };
    double s = f(lo) + f(hi);
    for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return s * h / 3.0;
}

// One-sample Kolmogorov-Smirnov statistic against U(0, 1).
inline double ks_uniform(std::vector<double> p) {
    std::sort(p.begin(), p.end());
    const double n = static_cast<double>(p.size());
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        d = std::max(d, (i + 1) / n - p[i]);
        d = std::max(d, p[i] - i / n);
    }
    return d;
}

// Asymptotic 1% critical value of the KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

}  // namespace qrng::oracle
