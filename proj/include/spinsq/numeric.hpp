// numeric.hpp - small numerical building blocks (log-space arithmetic,
// compensated summation, 1-D minimization)
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

#include "errors.hpp"

namespace spinsq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Neumaier (improved Kahan) accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Magnitude in log space plus an explicit sign channel (-1, 0, +1).
struct SignedLog {
    double log_abs = -kInf;
    int sign = 0;

    static SignedLog from_value(double v) noexcept {
        if (v == 0.0) return {};
        return {std::log(std::abs(v)), v > 0 ? 1 : -1};
    }
    double value() const noexcept { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

    friend SignedLog operator*(SignedLog a, SignedLog b) noexcept {
        if (a.sign == 0 || b.sign == 0) return {};
        return {a.log_abs + b.log_abs, a.sign * b.sign};
    }
};

/// log(sum exp(x_i)), max-shifted. Empty or all -inf input gives -inf.
inline double log_sum_exp(std::span<const double> xs) noexcept {
    if (xs.empty()) return -kInf;
    const double mx = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(mx)) return mx;
    CompensatedSum s;
    for (double x : xs) s += std::exp(x - mx);
    return mx + std::log(s.value());
}

/// log C(n, k) via log-gamma.
inline double log_binomial(int n, int k) noexcept {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

struct Minimum {
    double x;
    double f;
};

/// Golden-section search for the minimum of a unimodal f on [lo, hi].
template <class F>
Minimum golden_section_minimize(F&& f, double lo, double hi, double x_tol = 1e-10,
                                int max_iter = 500) {
    if (!(hi > lo)) throw DomainError("golden_section_minimize: empty bracket");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > x_tol; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

/// Wrap an angle into [0, 2 pi).
inline double wrap_two_pi(double x) noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(x, two_pi);
    if (r < 0) r += two_pi;
    return r;
}

}  // namespace spinsq
