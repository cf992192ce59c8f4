// squeezing.hpp - closed-form squeezing from the Gaussian-integral
// solution, the most-probable-outcome limit and the scattering penalties
#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "backaction.hpp"
#include "dicke.hpp"
#include "errors.hpp"
#include "numeric.hpp"
#include "optics.hpp"

namespace spinsq {

/// Integrals over the real line of e^{-a m^2 + b m + c} times
/// 1 (g1), m^2 (g2) and (N/2 - m) (g3). Requires a > 0.
struct GaussianIntegrals {
    double g1, g2, g3;
};

inline GaussianIntegrals gaussian_integrals(double a, double b, double c, double n_atoms) {
    if (!(a > 0.0)) throw DomainError("gaussian_integrals: a must be > 0");
    const double g1 = std::sqrt(std::numbers::pi / a) * std::exp(b * b / (4.0 * a) + c);
    return {g1, (2.0 * a + b * b) / (4.0 * a * a) * g1, (a * n_atoms - b) / (2.0 * a) * g1};
}

/// Which expression is used for the conditional <Jx>.
///   gaussian_integral: the ratio of the Gaussian integrals, evaluated exactly
///   appendix_printed:  the simplified closed form as usually quoted
///   large_n:           N/2
enum class JxMode { gaussian_integral, appendix_printed, large_n };

inline const char* to_string(JxMode m) noexcept {
    switch (m) {
        case JxMode::gaussian_integral: return "gaussian_integral";
        case JxMode::appendix_printed: return "appendix_printed";
        case JxMode::large_n: return "large_n";
    }
    return "?";
}

/// <Jz^2>, <Jx>, xi^2 from the second-order kernel with the binomial prior
/// replaced by its Gaussian limit.
inline SqueezingResult xi_closed_form(const EnsembleSpec& ens, const ProbeConfig& probe,
                                      const MeasurementOutcome& out,
                                      JxMode jx_mode = JxMode::gaussian_integral,
                                      double eps_sing = kDefaultSingularEps) {
    validate(ens);
    const auto c = expansion_coeffs(probe, out, eps_sing);
    const double n = static_cast<double>(ens.n_atoms);
    const double k = effective_phase(ens, probe);
    const double k2 = k * k;
    const double d = 1.0 + 0.5 * n * k2 * c.lambda;
    if (!(d > 0.0)) throw DomainError("xi_closed_form: Gaussian integral diverges (lambda < 0)");

    const double jz2 = 0.25 * n * (1.0 / d + n * k2 * c.w * c.w / (d * d));

    double jx = 0.5 * n;
    switch (jx_mode) {
        case JxMode::gaussian_integral: {
            // e^{Wk + Yk^2} * G3(a, b', 0) / G1(a, b, 0) with b' = b - lambda k^2;
            // the exponent (b'^2 - b^2)/4a is expanded to avoid cancellation.
            const double a = 2.0 / n + c.lambda * k2;
            const double b = 2.0 * c.w * k;
            const double bp = b - c.lambda * k2;
            const double expo = c.w * k + c.y * k2 + (bp - b) * (bp + b) / (4.0 * a);
            jx = (0.5 * n - bp / (2.0 * a)) * std::exp(expo);
            break;
        }
        case JxMode::appendix_printed:
            jx = 0.5 * n * (1.0 - c.w * k / d) *
                 std::exp(-n * k2 * k2 * c.lambda * (c.w + 0.25 * c.lambda) / (2.0 + n * c.lambda * k2));
            break;
        case JxMode::large_n:
            break;
    }
    return make_squeezing(n, jz2, jx);
}

inline void check_eta_d(double eta, double d) {
    if (!(eta >= 0.0 && eta < 1.0)) throw DomainError("eta must lie in [0, 1)");
    if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError("optical depth must be finite and >= 0");
}

/// 1 / (1 + eta d)
inline double xi_most_probable(double eta, double d) {
    check_eta_d(eta, d);
    return 1.0 / (1.0 + eta * d);
}

/// How photon scattering degrades the measured squeezing.
///   reidc:  ideal squeezing divided by (1 - eta)^2
///   alkali: additive spin-flip and loss penalties
enum class NoiseModel { reidc, alkali };

inline const char* to_string(NoiseModel m) noexcept {
    return m == NoiseModel::reidc ? "reidc" : "alkali";
}

inline double xi_noisy(double eta, double d, NoiseModel model) {
    const double xi = xi_most_probable(eta, d);
    const double q = 1.0 - eta;
    if (model == NoiseModel::reidc) return xi / (q * q);
    return xi + eta / q + eta / (q * q);
}

struct EtaOptimum {
    double eta = 0.0;
    double xi_prime_sq = 1.0;
    bool at_boundary = false;  ///< no interior minimum; eta = 0 returned
};

inline constexpr double kEtaUpper = 1.0 - 1e-9;

/// Numeric minimizer of xi_noisy over eta in [0, 1).
inline EtaOptimum eta_optimal_numeric(double d, NoiseModel model, double x_tol = 1e-10) {
    check_eta_d(0.0, d);
    const auto mn = golden_section_minimize([&](double e) { return xi_noisy(e, d, model); }, 0.0,
                                            kEtaUpper, x_tol);
    const double f0 = xi_noisy(0.0, d, model);
    if (mn.f >= f0 || mn.x < 10.0 * x_tol) return {0.0, f0, true};
    return {mn.x, mn.f, false};
}

/// reidc: (d - 2) / (3 d) for d > 2; alkali: numeric minimizer.
inline EtaOptimum eta_optimal(double d, NoiseModel model) {
    if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("eta_optimal: d must be > 0");
    if (model == NoiseModel::alkali) return eta_optimal_numeric(d, model);
    if (d <= 2.0) return {0.0, 1.0, true};
    const double eta = (d - 2.0) / (3.0 * d);
    return {eta, xi_noisy(eta, d, model), false};
}

/// Per-atom phase sqrt(eta d / (2 N I0)).
inline double phi_from_eta_d(double eta, double d, double n_atoms, double i0) {
    if (!(eta > 0.0 && d > 0.0 && n_atoms > 0.0 && i0 > 0.0))
        throw DomainError("phi_from_eta_d: all arguments must be > 0");
    return std::sqrt(eta * d / (2.0 * n_atoms * i0));
}

/// -10 log10(xi^2)
inline double to_db(double xi_sq) {
    if (!(xi_sq > 0.0)) throw DomainError("to_db: xi^2 must be > 0");
    return -10.0 * std::log10(xi_sq);
}

}  // namespace spinsq
