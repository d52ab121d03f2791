#include "gsr/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace gsr::numerics {

namespace {
std::atomic<std::uint64_t> g_clamps{0};
constexpr double kNoise = 1e-12;
}  // namespace

double clamp_probability(double x) {
    if (x >= 0.0 && x <= 1.0) return x;
    if (std::isnan(x)) {
        g_clamps.fetch_add(1, std::memory_order_relaxed);
        return 0.0;
    }
    double y = x < 0.0 ? 0.0 : 1.0;
    if (std::abs(x - y) > kNoise) g_clamps.fetch_add(1, std::memory_order_relaxed);
    return y;
}

std::uint64_t clamp_events() { return g_clamps.load(std::memory_order_relaxed); }
void reset_clamp_events() { g_clamps.store(0, std::memory_order_relaxed); }

double power(double x, double k) {
    if (k == 0.0) return 1.0;
    if (x <= 0.0) return 0.0;
    if (k > 1e3) return std::exp(k * std::log(x));
    return std::pow(x, k);
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return std::round(c);
}

double parity_error(std::span<const double> flips) {
    double log_bias = 0.0;
    double prod = 1.0;
    bool use_log = true;
    for (double e : flips) {
        if (e > 0.5) use_log = false;
        prod *= 1.0 - 2.0 * e;
        if (use_log) log_bias += std::log1p(-2.0 * e);
    }
    return use_log ? -0.5 * std::expm1(log_bias) : 0.5 * (1.0 - prod);
}

double parity_error(int count_a, double a, int count_b, double b) {
    if (a <= 0.5 && b <= 0.5) {
        double lb = 0.0;
        if (count_a > 0) lb += count_a * std::log1p(-2.0 * a);
        if (count_b > 0) lb += count_b * std::log1p(-2.0 * b);
        return -0.5 * std::expm1(lb);
    }
    return 0.5 * (1.0 - std::pow(1.0 - 2.0 * a, count_a) * std::pow(1.0 - 2.0 * b, count_b));
}

double majority_error(int s, double e) {
    if (s <= 0) return 0.5;
    double total = 0.0;
    for (int j = s / 2 + 1; j <= s; ++j)
        total += binomial(s, j) * std::pow(e, j) * std::pow(1.0 - e, s - j);
    if (s % 2 == 0) total += 0.5 * binomial(s, s / 2) * std::pow(e * (1.0 - e), s / 2);
    return total;
}

double binary_entropy(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

}  // namespace gsr::numerics
