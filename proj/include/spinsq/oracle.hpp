// oracle.hpp - brute-force verification path: exact posterior squeezing,
// seeded outcome sampling and the closed-form comparison grid
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "backaction.hpp"
#include "dicke.hpp"
#include "optics.hpp"
#include "parallel.hpp"
#include "squeezing.hpp"

namespace spinsq {

/// Squeezing of the exact posterior; shares no code with the closed form
/// beyond the amplitudes.
inline SqueezingResult oracle_xi(const EnsembleSpec& ens, const ProbeConfig& probe,
                                 const MeasurementOutcome& out, const ExactCaps& caps = {}) {
    return collective_moments(posterior_weights(ens, probe, out, PosteriorMethod::exact, caps));
}

// ---------------------------------------------------------------- sampling

using Rng = std::mt19937_64;

inline constexpr const char* kRngAlgorithm =
    "mt19937_64 per chunk, chunk seed = splitmix64(root seed ^ golden * (chunk + 1))";
inline constexpr std::size_t kSampleChunk = 4096;
inline constexpr double kPoissonNormalSwitch = 1e6;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t root, std::uint64_t stream) noexcept {
    return splitmix64(root ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
}

/// Photon count with mean g: Poisson, or Normal(g, sqrt g) for large g.
inline double photon_count(double g, Rng& rng) {
    if (g <= 0.0) return 0.0;
    if (g > kPoissonNormalSwitch) {
        std::normal_distribution<double> nd(g, std::sqrt(g));
        return std::max(0.0, nd(rng));
    }
    std::poisson_distribution<long long> pd(g);
    return static_cast<double>(pd(rng));
}

/// One joint draw: m from the CSS, then independent counts of both modes.
inline MeasurementOutcome sample_outcome(const EnsembleSpec& ens, const ProbeConfig& probe,
                                         Rng& rng) {
    std::binomial_distribution<long long> bd(ens.n_atoms, 0.5);
    const double m = static_cast<double>(bd(rng)) - ens.half_n();
    const auto [a, b] = mode_amplitudes(ens, probe, m);
    const double ia = photon_count(a * a, rng);
    const double ib = photon_count(b * b, rng);
    return {ia, ib};
}

inline MeasurementOutcome sample_outcome(const EnsembleSpec& ens, const ProbeConfig& probe,
                                         std::uint64_t seed) {
    validate(ens);
    validate(probe);
    Rng rng(stream_seed(seed, 0));
    return sample_outcome(ens, probe, rng);
}

/// n draws; sample i comes from chunk i / kSampleChunk, so the sequence is
/// independent of the thread count.
inline std::vector<MeasurementOutcome> sample_outcomes(const EnsembleSpec& ens,
                                                       const ProbeConfig& probe, std::size_t n,
                                                       std::uint64_t seed, unsigned threads = 1) {
    validate(ens);
    validate(probe);
    std::vector<MeasurementOutcome> out(n);
    const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
    parallel_for(chunks, threads, [&](std::size_t c) {
        Rng rng(stream_seed(seed, c));
        const std::size_t end = std::min(n, (c + 1) * kSampleChunk);
        for (std::size_t i = c * kSampleChunk; i < end; ++i) out[i] = sample_outcome(ens, probe, rng);
    });
    return out;
}

// ------------------------------------------------ conditional distribution

struct XiSample {
    MeasurementOutcome outcome;
    double xi_sq = kInf;
    bool jx_vanishes = false;
};

struct Quantiles {
    double min = 0, q25 = 0, median = 0, q75 = 0, max = 0;
};

/// Linear-interpolation quantiles of an unsorted sample.
inline Quantiles quantiles(std::vector<double> v) {
    if (v.empty()) return {};
    std::sort(v.begin(), v.end());
    auto q = [&](double p) {
        const double h = p * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const auto hi = std::min(lo + 1, v.size() - 1);
        if (!std::isfinite(v[lo]) || !std::isfinite(v[hi])) return v[h - lo < 0.5 ? lo : hi];
        return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    return {v.front(), q(0.25), q(0.5), q(0.75), v.back()};
}

struct XiDistribution {
    std::vector<XiSample> samples;
    Quantiles summary;
};

/// Samples outcomes and evaluates xi^2 at each one, by the exact posterior
/// or by the closed form.
inline XiDistribution conditional_xi_distribution(const EnsembleSpec& ens,
                                                  const ProbeConfig& probe,
                                                  std::size_t n_samples, std::uint64_t seed,
                                                  PosteriorMethod method, unsigned threads = 1,
                                                  JxMode jx_mode = JxMode::gaussian_integral,
                                                  const ExactCaps& caps = {}) {
    XiDistribution dist;
    if (n_samples == 0) return dist;
    const auto outcomes = sample_outcomes(ens, probe, n_samples, seed, threads);
    dist.samples.resize(n_samples);
    parallel_for(n_samples, threads, [&](std::size_t i) {
        const auto r = method == PosteriorMethod::exact
                           ? oracle_xi(ens, probe, outcomes[i], caps)
                           : xi_closed_form(ens, probe, outcomes[i], jx_mode);
        dist.samples[i] = {outcomes[i], r.xi_sq, r.jx_vanishes};
    });
    std::vector<double> xs;
    xs.reserve(n_samples);
    for (const auto& s : dist.samples) xs.push_back(s.xi_sq);
    dist.summary = quantiles(std::move(xs));
    return dist;
}

// ------------------------------------------------------- comparison grid

/// Desk-scale grid on which the exact posterior and the closed form are
/// compared. `strength` is the measurement strength 2 I0 N phi^2.
struct CompareGrid {
    std::vector<std::int64_t> n_atoms{100, 400, 1000};
    std::vector<double> i0{50, 100};
    std::vector<double> strength{0.5, 1, 4};
    std::vector<double> x_t{std::numbers::pi / 8, std::numbers::pi / 4, 3 * std::numbers::pi / 8};
    std::vector<double> offsets{-1, 0, 1};  ///< outcome offsets in units of the per-axis std
    double rel_tol = 0.05;
    double phi_sqrt_n_coeff = 0.0;  ///< tolerance = max(rel_tol, coeff * phi sqrt N)
    JxMode jx_mode = JxMode::gaussian_integral;
};

struct CompareRow {
    std::int64_t n_atoms;
    double i0, strength, x_t, off_alpha, off_beta, phi;
    MeasurementOutcome outcome;
    double xi_closed, xi_oracle, rel_err, tol;
    bool pass;
};

struct CompareReport {
    std::vector<CompareRow> rows;
    double max_rel_err = 0.0;
    std::size_t n_fail = 0;
    bool pass() const noexcept { return n_fail == 0; }
};

inline CompareReport compare_report(const CompareGrid& g, unsigned threads = 1,
                                    const ExactCaps& caps = {}) {
    CompareReport rep;
    for (auto n : g.n_atoms)
        for (double i0 : g.i0)
            for (double s : g.strength)
                for (double x : g.x_t)
                    for (double oa : g.offsets)
                        for (double ob : g.offsets) {
                            CompareRow r{};
                            r.n_atoms = n;
                            r.i0 = i0;
                            r.strength = s;
                            r.x_t = x;
                            r.off_alpha = oa;
                            r.off_beta = ob;
                            r.phi = std::sqrt(s / (2.0 * i0 * static_cast<double>(n)));
                            rep.rows.push_back(r);
                        }

    parallel_for(rep.rows.size(), threads, [&](std::size_t i) {
        CompareRow& r = rep.rows[i];
        const EnsembleSpec ens{r.n_atoms, r.phi};
        const ProbeConfig probe = make_probe(r.i0, r.x_t);
        r.outcome = outcome_spread(ens, probe).at(r.off_alpha, r.off_beta);
        r.xi_closed = xi_closed_form(ens, probe, r.outcome, g.jx_mode).xi_sq;
        r.xi_oracle = oracle_xi(ens, probe, r.outcome, caps).xi_sq;
        r.rel_err = std::abs(r.xi_closed - r.xi_oracle) / r.xi_oracle;
        r.tol = std::max(g.rel_tol, g.phi_sqrt_n_coeff * r.phi * std::sqrt(static_cast<double>(r.n_atoms)));
        r.pass = r.rel_err <= r.tol;
    });
    for (const auto& r : rep.rows) {
        rep.max_rel_err = std::max(rep.max_rel_err, r.rel_err);
        if (!r.pass) ++rep.n_fail;
    }
    return rep;
}

}  // namespace spinsq
