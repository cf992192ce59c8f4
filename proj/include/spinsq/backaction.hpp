// backaction.hpp - conditional reweighting of the Dicke distribution by an
// intensity measurement of both probe modes
//
// Per mode with outcome I and envelopes g_m, the POVM element sandwiched
// between Dicke states is
//   <M>_{m,m'} = exp(-I - (g_m^2 + g_m'^2)/2) * S(I g_m g_m'),
//   S(x) = sum_n x^n / (n!)^2,
// i.e. I0(2 sqrt x) for x >= 0 and J0(2 sqrt|x|) for x < 0.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dicke.hpp"
#include "errors.hpp"
#include "numeric.hpp"
#include "optics.hpp"

namespace spinsq {

struct MeasurementOutcome {
    double i_alpha = 0.0;
    double i_beta = 0.0;
};

inline void validate(const MeasurementOutcome& o) {
    if (!(o.i_alpha >= 0.0) || !(o.i_beta >= 0.0) || !std::isfinite(o.i_alpha) ||
        !std::isfinite(o.i_beta))
        throw DomainError("measurement outcomes must be finite and >= 0");
}

/// The outcomes with the largest likelihood: W = 0, lambda = 4 I0.
inline MeasurementOutcome most_probable_outcome(const ProbeConfig& p) {
    return {4.0 * p.i0 * std::pow(std::cos(p.x_t), 2), 4.0 * p.i0 * std::pow(std::sin(p.x_t), 2)};
}

/// Outcome-plane centre (most probable outcomes) and per-axis standard
/// deviations from the second-order per-mode variances.
struct OutcomeSpread {
    MeasurementOutcome centre;
    double std_alpha = 0.0;
    double std_beta = 0.0;

    MeasurementOutcome at(double off_alpha, double off_beta) const noexcept {
        return {std::max(0.0, centre.i_alpha + off_alpha * std_alpha),
                std::max(0.0, centre.i_beta + off_beta * std_beta)};
    }
};

inline OutcomeSpread outcome_spread(const EnsembleSpec& ens, const ProbeConfig& p) {
    const auto lm = intensity_moments_approx(ens, p);
    return {most_probable_outcome(p), std::sqrt(std::max(0.0, lm.var_alpha)),
            std::sqrt(std::max(0.0, lm.var_beta))};
}

struct ExpansionCoeffs {
    double v = 0, w = 0, y = 0, z = 0, lambda = 0;
};

/// Second-order coefficients of the log kernel in the per-mode phase k:
///   log K(m,m') ~ V + W k (m+m') + k^2 (Y (m^2+m'^2) + Z m m').
/// Defined for the cos/sin modulation preset only.
inline ExpansionCoeffs expansion_coeffs(const ProbeConfig& p, const MeasurementOutcome& out,
                                        double eps_sing = kDefaultSingularEps) {
    validate(p);
    validate(out);
    if (auto f = singular_factor(p.x_t, eps_sing)) throw SingularPhase(*f, p.x_t);
    if (!is_cos_sin_preset(p.theta))
        throw DomainError("expansion_coeffs: only the theta = pi modulation has a second-order form");
    if (p.i0 <= 0.0) throw DomainError("expansion_coeffs: i0 must be > 0");

    const double c = std::cos(p.x_t), s = std::sin(p.x_t);
    const double ac = std::abs(c), as = std::abs(s);
    const double sa = std::sqrt(out.i_alpha / p.i0);
    const double sb = std::sqrt(out.i_beta / p.i0);
    const double i0 = p.i0;

    ExpansionCoeffs k;
    k.v = 4.0 * i0 * (sa * ac + sb * as - 1.0);
    k.w = 2.0 * i0 * (sa * s * std::copysign(1.0, c) + sb * c * std::copysign(1.0, s) -
                      2.0 * std::sin(2.0 * p.x_t));
    k.y = -0.5 * i0 * (sa * (1.0 + c * c) / ac + sb * (1.0 + s * s) / as);
    k.z = i0 * (sa * s * s / ac + sb * c * c / as);
    k.lambda = -2.0 * k.y - k.z;
    return k;
}

inline constexpr std::int64_t kDefaultMaxSeriesTerms = 1'000'000;
inline constexpr double kSeriesRelTol = 1e-18;
inline constexpr double kAlternatingSeriesLimit = 16.0;

/// log|S(x)| and sign of S(x) = sum_n x^n/(n!)^2.
inline SignedLog log_bessel_series(double x, std::int64_t max_terms = kDefaultMaxSeriesTerms) {
    if (!std::isfinite(x)) throw DomainError("log_bessel_series: non-finite argument");
    if (x == 0.0) return {0.0, 1};

    if (x > 0.0) {
        // Terms t_n = n log x - 2 log n! peak near n = sqrt(x); sum outward.
        const double lx = std::log(x);
        auto log_term = [lx](double n) { return n * lx - 2.0 * std::lgamma(n + 1.0); };
        const double peak = std::floor(std::sqrt(x));
        const double t_max = std::max(log_term(peak), log_term(peak + 1.0));
        const double cut = t_max + std::log(kSeriesRelTol);
        CompensatedSum sum;
        std::int64_t used = 0;
        for (double n = peak;; n += 1.0) {
            const double t = log_term(n);
            if (t < cut) break;
            sum += std::exp(t - t_max);
            if (++used > max_terms) break;
        }
        for (double n = peak - 1.0; n >= 0.0; n -= 1.0) {
            const double t = log_term(n);
            if (t < cut) break;
            sum += std::exp(t - t_max);
            if (++used > max_terms) break;
        }
        if (used > max_terms)
            throw SeriesOverflow("Bessel series needs more than " + std::to_string(max_terms) +
                                 " terms at x = " + std::to_string(x) +
                                 "; reduce i0 or the outcome intensity");
        return {t_max + std::log(sum.value()), 1};
    }

    const double ax = -x;
    double value;
    if (ax <= kAlternatingSeriesLimit) {
        CompensatedSum sum;
        double term = 1.0;
        double peak = 1.0;
        sum += term;
        for (std::int64_t n = 1; n <= max_terms; ++n) {
            term *= -ax / (static_cast<double>(n) * static_cast<double>(n));
            sum += term;
            peak = std::max(peak, std::abs(term));
            if (std::abs(term) < kSeriesRelTol * peak) break;
        }
        value = sum.value();
    } else {
        value = std::cyl_bessel_j(0.0, 2.0 * std::sqrt(ax));
    }
    return SignedLog::from_value(value);
}

/// Log POVM matrix element of a single mode (outcome i, envelopes g, gp).
inline SignedLog mode_povm_log(double i, double g, double gp,
                               std::int64_t max_terms = kDefaultMaxSeriesTerms) {
    SignedLog s = log_bessel_series(i * g * gp, max_terms);
    s.log_abs += -i - 0.5 * (g * g + gp * gp);
    return s;
}

/// <M_alpha>_{m,m'} <M_beta>_{m,m'} in signed log form, all factors kept.
inline SignedLog povm_weight_exact(const ProbeConfig& p, const MeasurementOutcome& out,
                                   const EnsembleSpec& ens, double m, double m_prime,
                                   std::int64_t max_terms = kDefaultMaxSeriesTerms) {
    validate(out);
    if (m_prime < m) std::swap(m, m_prime);  // bitwise exchange symmetry
    const auto [a, b] = mode_amplitudes(ens, p, m);
    const auto [ap, bp] = mode_amplitudes(ens, p, m_prime);
    return mode_povm_log(out.i_alpha, a, ap, max_terms) * mode_povm_log(out.i_beta, b, bp, max_terms);
}

enum class PosteriorMethod { exact, second_order };

inline const char* to_string(PosteriorMethod m) noexcept {
    return m == PosteriorMethod::exact ? "exact" : "second_order";
}

/// Largest N for which a full Dicke table is built; beyond it use the closed form.
inline constexpr std::int64_t kMaxTabulatedAtoms = 10'000'000;

struct ExactCaps {
    std::int64_t max_atoms = 2000;
    double max_i0 = 1e4;
    std::int64_t max_series_terms = kDefaultMaxSeriesTerms;
};

/// CSS prior reweighted by the measurement. Diagonal log-weights plus the
/// adjacent off-diagonal ratio F(m) = K(m, m+1) / K(m, m) used for <Jx>.
inline DickeWeights posterior_weights(const EnsembleSpec& ens, const ProbeConfig& p,
                                      const MeasurementOutcome& out, PosteriorMethod method,
                                      const ExactCaps& caps = {},
                                      double eps_sing = kDefaultSingularEps) {
    validate(ens);
    validate(p);
    validate(out);
    const std::int64_t cap = method == PosteriorMethod::exact ? caps.max_atoms : kMaxTabulatedAtoms;
    if (ens.n_atoms > cap)
        throw SizeError("posterior_weights: N = " + std::to_string(ens.n_atoms) + " exceeds the cap " +
                        std::to_string(cap));
    const int n = static_cast<int>(ens.n_atoms);
    DickeWeights w = css_log_weights(n);
    w.offdiag_logf.assign(n, 0.0);
    w.offdiag_sign.assign(n, 1);

    if (method == PosteriorMethod::second_order) {
        const auto c = expansion_coeffs(p, out, eps_sing);
        const double k = effective_phase(ens, p);
        for (int i = 0; i <= n; ++i) {
            const double m = w.m(i);
            w.log_w[i] += 2.0 * c.w * k * m - c.lambda * k * k * m * m;
            if (i < n) w.offdiag_logf[i] = c.w * k + c.y * k * k - c.lambda * k * k * m;
        }
        w.normalize();
        return w;
    }

    if (p.i0 > caps.max_i0)
        throw SizeError("posterior_weights: i0 = " + std::to_string(p.i0) +
                        " exceeds the exact-kernel cap " + std::to_string(caps.max_i0));
    std::vector<double> a(n + 1), b(n + 1);
    for (int i = 0; i <= n; ++i) std::tie(a[i], b[i]) = mode_amplitudes(ens, p, w.m(i));

    // The -I_alpha - I_beta factor is common to every element and dropped.
    auto kernel = [&](int i, int j) {
        SignedLog ka = log_bessel_series(out.i_alpha * a[i] * a[j], caps.max_series_terms);
        SignedLog kb = log_bessel_series(out.i_beta * b[i] * b[j], caps.max_series_terms);
        SignedLog r = ka * kb;
        r.log_abs -= 0.5 * (a[i] * a[i] + a[j] * a[j] + b[i] * b[i] + b[j] * b[j]);
        return r;
    };

    std::vector<SignedLog> diag(n + 1);
    for (int i = 0; i <= n; ++i) {
        diag[i] = kernel(i, i);
        w.log_w[i] += diag[i].sign == 0 ? -kInf : diag[i].log_abs;
    }
    for (int i = 0; i < n; ++i) {
        const SignedLog off = kernel(i, i + 1);
        if (off.sign == 0 || diag[i].sign == 0) {
            w.offdiag_logf[i] = -kInf;
            w.offdiag_sign[i] = 0;
        } else {
            w.offdiag_logf[i] = off.log_abs - diag[i].log_abs;
            w.offdiag_sign[i] = static_cast<std::int8_t>(off.sign * diag[i].sign);
        }
    }
    w.normalize();
    return w;
}

}  // namespace spinsq
