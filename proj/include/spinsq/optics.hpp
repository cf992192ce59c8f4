// optics.hpp - probe amplitudes after the dispersive interaction and the
// photon-count moments of the two probe modes
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dicke.hpp"
#include "errors.hpp"
#include "numeric.hpp"

namespace spinsq {

/// How the per-atom phase enters the mode envelopes.
///   full: cos(X_t - m phi), the form used by the measurement kernel
///   half: cos(X_t - m phi / 2), the form the intensity-moment formulas assume
enum class PhaseConvention { full, half };

inline const char* to_string(PhaseConvention c) noexcept {
    return c == PhaseConvention::full ? "full" : "half";
}

inline constexpr double kThetaCosSin = std::numbers::pi;  ///< beta ~ sin(X_t + m k)
inline constexpr double kThetaCosCos = 0.0;               ///< beta ~ cos(X_t + m k)
inline constexpr double kDefaultSingularEps = 1e-6;

struct ProbeConfig {
    double i0 = 0.0;   ///< photons per sideband pair
    double x_t = 0.0;  ///< setup phase [rad]
    double theta = kThetaCosSin;
    PhaseConvention convention = PhaseConvention::full;
};

inline void validate(const ProbeConfig& p) {
    if (!(p.i0 >= 0.0) || !std::isfinite(p.i0)) throw DomainError("i0 must be finite and >= 0");
    if (!std::isfinite(p.x_t) || !std::isfinite(p.theta)) throw DomainError("probe phases must be finite");
}

/// Checked constructor; stores X_t modulo 2 pi.
inline ProbeConfig make_probe(double i0, double x_t, double theta = kThetaCosSin,
                              PhaseConvention conv = PhaseConvention::full) {
    ProbeConfig p{i0, x_t, theta, conv};
    validate(p);
    p.x_t = wrap_two_pi(x_t);
    return p;
}

/// "cos" or "sin" if that factor of X_t is within eps of zero.
inline std::optional<std::string> singular_factor(double x_t, double eps = kDefaultSingularEps) {
    if (std::abs(std::cos(x_t)) <= eps) return "cos";
    if (std::abs(std::sin(x_t)) <= eps) return "sin";
    return std::nullopt;
}

inline bool is_cos_sin_preset(double theta) noexcept {
    return std::abs(std::remainder(theta - kThetaCosSin, 2.0 * std::numbers::pi)) < 1e-12;
}

/// Phase per unit of m actually applied to each mode.
inline double effective_phase(const EnsembleSpec& ens, const ProbeConfig& p) noexcept {
    return p.convention == PhaseConvention::full ? ens.phi : 0.5 * ens.phi;
}

/// Real envelopes (alpha_m, beta_m):
///   alpha_m = 2 sqrt(I0) cos(X_t - m k),  beta_m = 2 sqrt(I0) cos(X_t - theta/2 + m k)
inline std::pair<double, double> mode_amplitudes(const EnsembleSpec& ens, const ProbeConfig& p,
                                                 double m) {
    if (std::abs(m) > ens.half_n() + 1e-9)
        throw DomainError("mode_amplitudes: |m| exceeds N/2");
    const double k = effective_phase(ens, p);
    const double amp = 2.0 * std::sqrt(p.i0);
    return {amp * std::cos(p.x_t - m * k), amp * std::cos(p.x_t - 0.5 * p.theta + m * k)};
}

struct LightMoments {
    double mean_total = 0, var_total = 0;
    double mean_alpha = 0, var_alpha = 0;
    double mean_beta = 0, var_beta = 0;
    double mean_diff = 0, var_diff = 0;  ///< n_alpha - n_beta with theta = 0 envelopes
    bool expansion_warning = false;      ///< phi^2 N above the validity threshold
};

namespace detail {

// Mode 2 sqrt(I0) cos(psi + s m k), m ~ CSS: mean intensity and d<g>/dm,
// both to second order in k.
struct ModeExpansion {
    double mean;
    double slope;
};

inline ModeExpansion mode_expansion(double i0, double n, double k, double psi, double s) {
    return {4.0 * i0 * (std::pow(std::cos(psi), 2) - 0.25 * n * k * k * std::cos(2.0 * psi)),
            -4.0 * i0 * s * k * std::sin(2.0 * psi)};
}

}  // namespace detail

inline constexpr double kExpansionWarnThreshold = 0.1;

/// Second-order-in-phase moments. Photon counts are Poisson given m, so
/// Var(n) = E[g] + Var_m(g) with Var_m(g) ~ slope^2 N/4.
inline LightMoments intensity_moments_approx(const EnsembleSpec& ens, const ProbeConfig& p,
                                             double warn_threshold = kExpansionWarnThreshold) {
    validate(ens);
    validate(p);
    const double n = static_cast<double>(ens.n_atoms);
    const double k = effective_phase(ens, p);
    const double q = 0.25 * n;  // Var(m) of the CSS

    const auto a = detail::mode_expansion(p.i0, n, k, p.x_t, -1.0);
    const auto b = detail::mode_expansion(p.i0, n, k, p.x_t - 0.5 * p.theta, +1.0);
    const auto b0 = detail::mode_expansion(p.i0, n, k, p.x_t, +1.0);  // theta = 0 partner

    LightMoments lm;
    lm.mean_alpha = a.mean;
    lm.var_alpha = a.mean + a.slope * a.slope * q;
    lm.mean_beta = b.mean;
    lm.var_beta = b.mean + b.slope * b.slope * q;
    lm.mean_total = a.mean + b.mean;
    lm.var_total = lm.mean_total + std::pow(a.slope + b.slope, 2) * q;
    lm.mean_diff = a.mean - b0.mean;
    lm.var_diff = a.mean + b0.mean + std::pow(a.slope - b0.slope, 2) * q;
    lm.expansion_warning = ens.phi * ens.phi * n > warn_threshold;
    return lm;
}

inline constexpr std::int64_t kExactSumCap = 1'000'000;

/// Moments by direct summation over the Dicke distribution, no truncation.
inline LightMoments intensity_moments_exact(const EnsembleSpec& ens, const ProbeConfig& p,
                                            std::int64_t cap = kExactSumCap) {
    validate(ens);
    validate(p);
    if (ens.n_atoms > cap)
        throw SizeError("intensity_moments_exact: N = " + std::to_string(ens.n_atoms) +
                        " exceeds the exact-sum cap " + std::to_string(cap));
    const int n = static_cast<int>(ens.n_atoms);
    const auto w = css_log_weights(n).probabilities();
    const double k = effective_phase(ens, p);
    const double i4 = 4.0 * p.i0;

    std::vector<double> ga(n + 1), gb(n + 1), gb0(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double m = dicke_m(n, i);
        ga[i] = i4 * std::pow(std::cos(p.x_t - m * k), 2);
        gb[i] = i4 * std::pow(std::cos(p.x_t - 0.5 * p.theta + m * k), 2);
        gb0[i] = i4 * std::pow(std::cos(p.x_t + m * k), 2);
    }

    auto mean_of = [&](auto&& g) {
        CompensatedSum s;
        for (int i = 0; i <= n; ++i) s += w[i] * g(i);
        return s.value();
    };
    auto var_of = [&](auto&& g, double mu) {
        CompensatedSum s;
        for (int i = 0; i <= n; ++i) s += w[i] * std::pow(g(i) - mu, 2);
        return s.value();
    };
    auto A = [&](int i) { return ga[i]; };
    auto B = [&](int i) { return gb[i]; };
    auto T = [&](int i) { return ga[i] + gb[i]; };
    auto S0 = [&](int i) { return ga[i] + gb0[i]; };
    auto D0 = [&](int i) { return ga[i] - gb0[i]; };

    LightMoments lm;
    lm.mean_alpha = mean_of(A);
    lm.var_alpha = lm.mean_alpha + var_of(A, lm.mean_alpha);
    lm.mean_beta = mean_of(B);
    lm.var_beta = lm.mean_beta + var_of(B, lm.mean_beta);
    lm.mean_total = mean_of(T);
    lm.var_total = lm.mean_total + var_of(T, lm.mean_total);
    lm.mean_diff = mean_of(D0);
    lm.var_diff = mean_of(S0) + var_of(D0, lm.mean_diff);
    return lm;
}

}  // namespace spinsq
