// dicke.hpp - coherent-spin-state bookkeeping in the Dicke basis
//
// Dicke index m runs over -N/2..N/2 in unit steps; odd N gives half-integer
// m. Arrays are indexed by i = m + N/2, i.e. 2m = 2i - N.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"

namespace spinsq {

struct EnsembleSpec {
    std::int64_t n_atoms = 1;
    double phi = 0.0;  ///< dispersive phase per atom [rad]

    double half_n() const noexcept { return 0.5 * n_atoms; }
};

inline constexpr double kDefaultPhiNCap = 1e3;

inline void validate(const EnsembleSpec& ens, double phi_n_cap = kDefaultPhiNCap) {
    if (ens.n_atoms < 1) throw DomainError("n_atoms must be >= 1");
    if (!(ens.phi >= 0.0) || !std::isfinite(ens.phi)) throw DomainError("phi must be finite and >= 0");
    if (ens.phi * ens.n_atoms > phi_n_cap)
        throw DomainError("phi * n_atoms = " + std::to_string(ens.phi * ens.n_atoms) +
                          " exceeds the sanity cap " + std::to_string(phi_n_cap));
}

/// Dicke index of array slot i.
inline double dicke_m(int n_atoms, int i) noexcept { return 0.5 * (2 * i - n_atoms); }

/// Array slot of Dicke index m; throws if m is not a valid index for N.
inline int dicke_slot(int n_atoms, double m) {
    const double i = m + 0.5 * n_atoms;
    const double ir = std::round(i);
    if (std::abs(i - ir) > 1e-9 || ir < 0 || ir > n_atoms)
        throw DomainError("m = " + std::to_string(m) + " is not a Dicke index for N = " +
                          std::to_string(n_atoms));
    return static_cast<int>(ir);
}

/// Log-domain weights over m, optionally with the adjacent off-diagonal
/// factors F(m, m+1) needed for <J_x>. F is stored as log|F| plus a sign.
struct DickeWeights {
    int n_atoms = 0;
    std::vector<double> log_w;                 // N+1 entries
    std::vector<double> offdiag_logf;          // N entries or empty
    std::vector<std::int8_t> offdiag_sign;     // parallel to offdiag_logf

    bool has_offdiag() const noexcept { return !offdiag_logf.empty(); }
    double m(int i) const noexcept { return dicke_m(n_atoms, i); }

    /// Shift log_w so that sum exp(log_w) == 1.
    void normalize() {
        const double lse = log_sum_exp(log_w);
        if (!std::isfinite(lse)) throw DomainError("Dicke weights are not normalizable");
        for (double& x : log_w) x -= lse;
    }

    std::vector<double> probabilities() const {
        const double lse = log_sum_exp(log_w);
        std::vector<double> p(log_w.size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(log_w[i] - lse);
        return p;
    }
};

struct SqueezingResult {
    double jz2 = 0.0;
    double jx = 0.0;
    double xi_sq = kInf;
    bool jx_vanishes = false;  ///< xi_sq is the +inf sentinel
};

/// xi^2 = N <Jz^2> / <Jx>^2, with the +inf sentinel for <Jx> == 0.
inline SqueezingResult make_squeezing(double n_atoms, double jz2, double jx) {
    SqueezingResult r{jz2, jx, kInf, false};
    if (jx == 0.0 || !std::isfinite(jx)) {
        r.jx_vanishes = true;
        return r;
    }
    r.xi_sq = n_atoms * jz2 / (jx * jx);
    return r;
}

/// Binomial CSS weights c_m^2 = C(N, N/2+m) / 2^N, in log space.
inline DickeWeights css_log_weights(int n_atoms) {
    if (n_atoms < 1) throw DomainError("css_log_weights: n_atoms must be >= 1");
    DickeWeights w;
    w.n_atoms = n_atoms;
    w.log_w.resize(n_atoms + 1);
    const double log2n = n_atoms * std::numbers::ln2;
    for (int i = 0; 2 * i <= n_atoms; ++i)
        w.log_w[i] = w.log_w[n_atoms - i] = log_binomial(n_atoms, i) - log2n;
    w.normalize();
    return w;
}

/// <Jz^2>, <Jx> and xi^2 of a (possibly unnormalized) weight set.
///   <Jx> = sum_m w_m (N/2 - m) F(m, m+1) / sum_m w_m,  F == 1 when absent.
inline SqueezingResult collective_moments(const DickeWeights& w) {
    const int n = w.n_atoms;
    if (n < 1 || static_cast<int>(w.log_w.size()) != n + 1)
        throw DomainError("collective_moments: log_w must have N+1 entries");
    if (w.has_offdiag() && (static_cast<int>(w.offdiag_logf.size()) != n ||
                            w.offdiag_sign.size() != w.offdiag_logf.size()))
        throw DomainError("collective_moments: offdiag_logf must have N entries");

    const auto p = w.probabilities();
    CompensatedSum jz2, jx;
    for (int i = 0; i <= n; ++i) {
        const double m = w.m(i);
        jz2 += p[i] * m * m;
        if (i == n) continue;  // (N/2 - m) vanishes at the top state
        double f = 1.0;
        if (w.has_offdiag()) f = w.offdiag_sign[i] * std::exp(w.offdiag_logf[i]);
        jx += p[i] * (0.5 * n - m) * f;
    }
    return make_squeezing(n, jz2.value(), jx.value());
}

}  // namespace spinsq
