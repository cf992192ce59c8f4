// planner.hpp - experimental parameter chain for a doped crystal: material
// and geometry -> atom number, cross-section, photon budget, detuning and
// the achievable squeezing. All lengths in cm.
#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "squeezing.hpp"

namespace spinsq {

inline constexpr double kAvogadro = 6.02214076e23;           // 1/mol
inline constexpr double kYsoDensity = 4.44;                  // g/cm^3, Y2SiO5
inline constexpr double kDefaultUsableRatio = 1e-5;
inline constexpr double kDefaultModeArea = std::numbers::pi * 100e-4 * 100e-4;  // 100 um radius

struct MaterialSpec {
    std::string name;
    double molar_mass = 0.0;    ///< g/mol
    double doping = 0.0;        ///< dopant fraction
    double absorption = 0.0;    ///< 1/cm
    double usable_ratio = kDefaultUsableRatio;
    double host_density = kYsoDensity;  ///< g/cm^3
};

struct GeometrySpec {
    double mode_area = kDefaultModeArea;  ///< cm^2
    double optical_depth = 0.0;
};

struct PlanResult {
    std::string name;
    double optical_depth = 0;
    double length = 0;           ///< cm
    double sigma = 0;            ///< cm^2
    double n_atoms = 0;
    double i0 = 0;
    double detuning_over_gamma = 0;
    double eta = 0;
    double phi = 0;
    double xi_prime_sq = 0;
    double xi_prime_db = 0;
    bool beyond_optimum = false;  ///< eta > 2 eta_opt, the noise penalty dominates
};

inline void validate(const MaterialSpec& m) {
    const std::string who = "material '" + m.name + "': ";
    if (!(m.molar_mass > 0 && m.doping > 0 && m.absorption > 0 && m.usable_ratio > 0 &&
          m.host_density > 0))
        throw DomainError(who + "all properties must be > 0");
    if (m.doping > 1.0) throw DomainError(who + "doping must be <= 1");
    if (m.usable_ratio > 1.0) throw DomainError(who + "usable_ratio must be <= 1");
}

inline void validate(const GeometrySpec& g) {
    if (!(g.mode_area > 0 && g.optical_depth > 0))
        throw DomainError("geometry: mode_area and optical_depth must be > 0");
}

inline PlanResult plan(const MaterialSpec& mat, const GeometrySpec& geom, double eta) {
    validate(mat);
    validate(geom);
    if (!(eta > 0.0 && eta < 1.0)) throw DomainError("plan: eta must lie in (0, 1)");

    const double d = geom.optical_depth;
    const double a = geom.mode_area;
    const double dopant_density = mat.host_density * mat.doping * kAvogadro * mat.usable_ratio /
                                  mat.molar_mass;  // usable ions per cm^3

    PlanResult r;
    r.name = mat.name;
    r.optical_depth = d;
    r.eta = eta;
    r.length = d / mat.absorption;
    r.n_atoms = dopant_density * a * r.length;
    r.sigma = mat.absorption / dopant_density;
    r.i0 = eta * r.sigma * r.n_atoms * r.n_atoms / (2.0 * a);  // phi N ~ 1
    r.detuning_over_gamma = 2.0 * std::sqrt(2.0 * r.i0 * r.sigma / (eta * a));
    r.phi = phi_from_eta_d(eta, d, r.n_atoms, r.i0);
    r.xi_prime_sq = xi_noisy(eta, d, NoiseModel::reidc);
    r.xi_prime_db = to_db(r.xi_prime_sq);
    const auto opt = eta_optimal(d, NoiseModel::reidc);
    r.beyond_optimum = !opt.at_boundary && eta > 2.0 * opt.eta;
    return r;
}

/// Plan at the optimal scattering probability of the REIDC noise model.
inline PlanResult plan_optimal(const MaterialSpec& mat, const GeometrySpec& geom) {
    const auto opt = eta_optimal(geom.optical_depth, NoiseModel::reidc);
    if (opt.at_boundary)
        throw DomainError("plan_optimal: no interior optimum for d = " +
                          std::to_string(geom.optical_depth));
    return plan(mat, geom, opt.eta);
}

struct MaterialPreset {
    MaterialSpec material;
    GeometrySpec geometry;
};

inline MaterialPreset eu_yso() {
    return {{"Eu", 152.0, 1e-3, 2.0, kDefaultUsableRatio, kYsoDensity}, {kDefaultModeArea, 10.0}};
}

inline MaterialPreset pr_yso() {
    return {{"Pr", 140.0, 5e-4, 20.0, kDefaultUsableRatio, kYsoDensity}, {kDefaultModeArea, 40.0}};
}

inline std::vector<PlanResult> table1() {
    std::vector<PlanResult> rows;
    for (const auto& p : {eu_yso(), pr_yso()}) rows.push_back(plan_optimal(p.material, p.geometry));
    return rows;
}

}  // namespace spinsq
