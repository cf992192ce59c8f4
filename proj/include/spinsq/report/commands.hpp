// commands.hpp - batch commands behind the command-line front end. Each
// returns a Table (metadata + fixed columns + rows) that renders to CSV,
// JSON or aligned text.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "../backaction.hpp"
#include "../config.hpp"
#include "../oracle.hpp"
#include "../parallel.hpp"
#include "../planner.hpp"
#include "../squeezing.hpp"

namespace spinsq {

inline constexpr const char* kVersion = "1.0.0";

using Cell = std::variant<double, std::int64_t, std::string, bool>;

struct Table {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_meta(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }
    void add_meta(std::string key, double value) { add_meta(std::move(key), detail::format_double(value)); }
};

struct CommandResult {
    Table table;
    bool gate_failed = false;
};

struct RunOptions {
    std::uint64_t seed = 20240229;
    unsigned threads = 1;
};

// ------------------------------------------------------------- rendering

namespace detail {

inline std::string cell_text(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) return format_double(v);
            else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
            else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
            else return v;
        },
        c);
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline std::string cell_short(const Cell& c) {
    if (const double* d = std::get_if<double>(&c)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", *d);
        return buf;
    }
    return cell_text(c);
}

}  // namespace detail

/// Metadata as '# key=value' lines, then a header row and data rows.
/// Doubles use the shortest representation that round-trips.
inline std::string render_csv(const Table& t) {
    std::ostringstream os;
    for (const auto& [k, v] : t.meta) os << "# " << k << "=" << v << "\n";
    for (std::size_t j = 0; j < t.columns.size(); ++j) os << (j ? "," : "") << t.columns[j];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t j = 0; j < row.size(); ++j)
            os << (j ? "," : "") << detail::csv_escape(detail::cell_text(row[j]));
        os << "\n";
    }
    return os.str();
}

/// {"meta": {...}, "columns": [...], "rows": [[...], ...]}; non-finite
/// doubles become null.
inline std::string render_json(const Table& t) {
    nlohmann::ordered_json j;
    j["meta"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.meta) j["meta"][k] = v;
    j["columns"] = t.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        auto r = nlohmann::ordered_json::array();
        for (const auto& c : row)
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) {
                        if (std::isfinite(v)) r.push_back(v);
                        else r.push_back(nullptr);
                    } else {
                        r.push_back(v);
                    }
                },
                c);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

/// Aligned columns, doubles to 6 significant digits.
inline std::string render_text(const Table& t) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back(t.columns);
    for (const auto& row : t.rows) {
        std::vector<std::string> r;
        for (const auto& c : row) r.push_back(detail::cell_short(c));
        cells.push_back(std::move(r));
    }
    std::vector<std::size_t> width(t.columns.size(), 0);
    for (const auto& r : cells)
        for (std::size_t j = 0; j < r.size() && j < width.size(); ++j) width[j] = std::max(width[j], r[j].size());
    std::ostringstream os;
    for (const auto& [k, v] : t.meta) os << "# " << k << "=" << v << "\n";
    for (const auto& r : cells) {
        std::string line;
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (j) line += "  ";
            line += std::string(width[j] - r[j].size(), ' ') + r[j];
        }
        os << line << "\n";
    }
    return os.str();
}

enum class OutputFormat { csv, json, text };

inline std::string render(const Table& t, OutputFormat f) {
    switch (f) {
        case OutputFormat::csv: return render_csv(t);
        case OutputFormat::json: return render_json(t);
        case OutputFormat::text: return render_text(t);
    }
    return {};
}

// -------------------------------------------------------------- helpers

namespace detail {

inline JxMode parse_jx_mode(Config& cfg, const std::string& section) {
    const auto s = cfg.get_string(section, "jx_mode", "gaussian_integral");
    if (s == "gaussian_integral") return JxMode::gaussian_integral;
    if (s == "appendix_printed") return JxMode::appendix_printed;
    if (s == "large_n") return JxMode::large_n;
    throw ConfigError(Config::where(section, "jx_mode"),
                      "expected gaussian_integral, appendix_printed or large_n, got '" + s + "'");
}

inline PhaseConvention parse_convention(Config& cfg, const std::string& section) {
    const auto s = cfg.get_string(section, "convention", "full");
    if (s == "full") return PhaseConvention::full;
    if (s == "half") return PhaseConvention::half;
    throw ConfigError(Config::where(section, "convention"), "expected full or half, got '" + s + "'");
}

inline PosteriorMethod parse_method(Config& cfg, const std::string& section) {
    const auto s = cfg.get_string(section, "method", "exact");
    if (s == "exact") return PosteriorMethod::exact;
    if (s == "second_order") return PosteriorMethod::second_order;
    throw ConfigError(Config::where(section, "method"), "expected exact or second_order, got '" + s + "'");
}

inline double positive(Config& cfg, const std::string& section, const std::string& key, double def) {
    const double v = cfg.get_double(section, key, def);
    if (!(v > 0.0)) throw ConfigError(Config::where(section, key), "must be > 0");
    return v;
}

inline void start_meta(Table& t, const std::string& command) {
    t.add_meta("spinsq.version", kVersion);
    t.add_meta("command", command);
}

inline void finish_meta(Table& t, const Config& cfg) {
    for (const auto& [k, v] : cfg.echo()) t.add_meta("config." + k, v);
}

/// Move X_t off the singular set by 2 eps, away from the nearest multiple of pi/2.
inline double nudge_phase(double x, double eps, std::string& note) {
    const double q = std::numbers::pi / 2;
    if (!singular_factor(x, eps)) return x;
    const double k = std::round(x / q);
    const double nx = x >= k * q ? k * q + 2 * eps : k * q - 2 * eps;
    note = "x_t " + format_double(x) + " is singular, nudged to " + format_double(nx);
    return nx;
}

inline std::vector<Cell> plan_row(const PlanResult& r, const MaterialSpec& m) {
    return {r.name,     m.molar_mass, m.doping, m.absorption,        r.optical_depth, r.xi_prime_sq,
            r.xi_prime_db, r.eta,     r.sigma,  r.n_atoms,           r.i0,            r.detuning_over_gamma,
            r.length,   r.phi};
}

inline std::vector<std::string> plan_columns() {
    return {"material", "molar_mass", "doping", "absorption_per_cm", "d",  "xi_prime_sq", "xi_prime_db",
            "eta",      "sigma_cm2",  "n_atoms", "i0",               "detuning_over_gamma", "length_cm",
            "phi"};
}

}  // namespace detail

// ------------------------------------------------------------- commands

/// Closed-form xi^2 over an outcome grid of +-span std around the most
/// probable outcomes, one grid per X_t.
inline CommandResult cmd_fig3(Config& cfg, const RunOptions& opt) {
    const std::string s = "fig3";
    cfg.require_known(s, {"i0", "d", "eta", "n_atoms", "x_t", "resolution", "span", "jx_mode", "eps_sing"});
    CommandResult res;
    Table& t = res.table;
    detail::start_meta(t, s);

    const double i0 = detail::positive(cfg, s, "i0", 1e11);
    const double d = detail::positive(cfg, s, "d", 40);
    const double eta = detail::positive(cfg, s, "eta", 0.32);
    const std::int64_t n = cfg.get_int(s, "n_atoms", 60'000'000'000LL);
    const auto xs = cfg.get_list(s, "x_t", {0.0, std::numbers::pi / 8, std::numbers::pi / 4, std::numbers::pi / 2}, true);
    const std::int64_t res_n = cfg.get_int(s, "resolution", 41);
    const double span = detail::positive(cfg, s, "span", 1.0);
    const JxMode jx = detail::parse_jx_mode(cfg, s);
    const double eps = detail::positive(cfg, s, "eps_sing", kDefaultSingularEps);
    if (n < 1) throw ConfigError(Config::where(s, "n_atoms"), "must be >= 1");
    if (res_n < 2) throw ConfigError(Config::where(s, "resolution"), "must be >= 2");
    if (eta >= 1.0) throw ConfigError(Config::where(s, "eta"), "must be < 1");

    const double phi = phi_from_eta_d(eta, d, static_cast<double>(n), i0);
    const EnsembleSpec ens{n, phi};
    t.add_meta("phi", phi);
    t.add_meta("xi_most_probable", xi_most_probable(eta, d));
    t.columns = {"x_t", "i_alpha", "i_beta", "xi_sq"};

    struct Pt {
        double x;
        MeasurementOutcome o;
    };
    std::vector<Pt> pts;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        std::string note;
        const double x = detail::nudge_phase(xs[k], eps, note);
        if (!note.empty()) t.add_meta("warning.x_t[" + std::to_string(k) + "]", note);
        const auto spread = outcome_spread(ens, make_probe(i0, x));
        const std::string tag = "x_t[" + std::to_string(k) + "].";
        t.add_meta(tag + "mean_alpha", spread.centre.i_alpha);
        t.add_meta(tag + "mean_beta", spread.centre.i_beta);
        t.add_meta(tag + "std_alpha", spread.std_alpha);
        t.add_meta(tag + "std_beta", spread.std_beta);
        for (std::int64_t i = 0; i < res_n; ++i)
            for (std::int64_t j = 0; j < res_n; ++j) {
                const double oa = span * (2.0 * i / (res_n - 1) - 1.0);
                const double ob = span * (2.0 * j / (res_n - 1) - 1.0);
                pts.push_back({x, spread.at(oa, ob)});
            }
    }
    std::vector<double> xi(pts.size());
    parallel_for(pts.size(), opt.threads, [&](std::size_t i) {
        xi[i] = xi_closed_form(ens, make_probe(i0, pts[i].x), pts[i].o, jx, eps).xi_sq;
    });
    for (std::size_t i = 0; i < pts.size(); ++i)
        t.rows.push_back({pts[i].x, pts[i].o.i_alpha, pts[i].o.i_beta, xi[i]});
    detail::finish_meta(t, cfg);
    return res;
}

/// Scattering-noise curves xi'^2(eta) and the (d, eta) density panel.
inline CommandResult cmd_fig4(Config& cfg, const RunOptions&) {
    const std::string s = "fig4";
    cfg.require_known(s, {"reidc_depths", "alkali_depths", "eta_min", "eta_max", "n_eta", "density_d_min",
                          "density_d_max", "density_n_d", "density_n_eta"});
    CommandResult res;
    Table& t = res.table;
    detail::start_meta(t, s);
    const auto reidc = cfg.get_list(s, "reidc_depths", {10, 40});
    const auto alkali = cfg.get_list(s, "alkali_depths", {16, 51, 75});
    const double e_lo = cfg.get_double(s, "eta_min", 1e-3);
    const double e_hi = cfg.get_double(s, "eta_max", 0.99);
    const std::int64_t n_eta = cfg.get_int(s, "n_eta", 199);
    const double d_lo = cfg.get_double(s, "density_d_min", 1);
    const double d_hi = cfg.get_double(s, "density_d_max", 100);
    const std::int64_t n_d = cfg.get_int(s, "density_n_d", 100);
    const std::int64_t n_eta_d = cfg.get_int(s, "density_n_eta", 99);
    if (!(e_lo > 0.0 && e_hi < 1.0 && e_lo < e_hi))
        throw ConfigError(Config::where(s, "eta_min"), "need 0 < eta_min < eta_max < 1");
    if (n_eta < 2) throw ConfigError(Config::where(s, "n_eta"), "must be >= 2");
    if (n_d < 0 || n_eta_d < 0) throw ConfigError(Config::where(s, "density_n_d"), "must be >= 0");
    for (double d : reidc)
        if (!(d > 0)) throw ConfigError(Config::where(s, "reidc_depths"), "depths must be > 0");
    for (double d : alkali)
        if (!(d > 0)) throw ConfigError(Config::where(s, "alkali_depths"), "depths must be > 0");

    auto lin = [](double lo, double hi, std::int64_t n, std::int64_t i) {
        return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    };
    t.columns = {"panel", "model", "d", "eta", "xi_prime_sq"};
    auto curve = [&](NoiseModel m, double d) {
        for (std::int64_t i = 0; i < n_eta; ++i) {
            const double e = lin(e_lo, e_hi, n_eta, i);
            t.rows.push_back({std::string("curve"), std::string(to_string(m)), d, e, xi_noisy(e, d, m)});
        }
        const auto opt = eta_optimal(d, m);
        const std::string key = std::string("optimum.") + to_string(m) + ".d" + detail::format_double(d);
        t.add_meta(key + ".eta", opt.eta);
        t.add_meta(key + ".xi_prime_sq", opt.xi_prime_sq);
    };
    for (double d : reidc) curve(NoiseModel::reidc, d);
    for (double d : alkali) curve(NoiseModel::alkali, d);
    for (NoiseModel m : {NoiseModel::reidc, NoiseModel::alkali})
        for (std::int64_t i = 0; i < n_d; ++i)
            for (std::int64_t j = 0; j < n_eta_d; ++j) {
                const double d = lin(d_lo, d_hi, n_d, i);
                const double e = lin(e_lo, e_hi, n_eta_d, j);
                t.rows.push_back({std::string("density"), std::string(to_string(m)), d, e, xi_noisy(e, d, m)});
            }
    detail::finish_meta(t, cfg);
    return res;
}

/// Both built-in material presets at their optimal eta.
inline CommandResult cmd_table1(Config& cfg, const RunOptions&) {
    CommandResult res;
    Table& t = res.table;
    detail::start_meta(t, "table1");
    t.columns = detail::plan_columns();
    const auto rows = table1();
    const MaterialSpec mats[] = {eu_yso().material, pr_yso().material};
    for (std::size_t i = 0; i < rows.size(); ++i) t.rows.push_back(detail::plan_row(rows[i], mats[i]));
    detail::finish_meta(t, cfg);
    return res;
}

/// Planner for one material, built in or from a materials file.
inline CommandResult cmd_plan(Config& cfg, const RunOptions&) {
    const std::string s = "plan";
    cfg.require_known(s, {"material", "materials_file", "eta", "optical_depth", "mode_area"});
    CommandResult res;
    Table& t = res.table;
    detail::start_meta(t, s);
    const std::string name = cfg.get_string(s, "material", "Pr");
    const std::string file = cfg.get_string(s, "materials_file", "");
    std::vector<MaterialPreset> presets = file.empty() ? std::vector{eu_yso(), pr_yso()} : load_materials_file(cfg.resolve(file));
    const MaterialPreset* chosen = nullptr;
    for (const auto& p : presets)
        if (p.material.name == name) chosen = &p;
    if (!chosen) throw ConfigError(Config::where(s, "material"), "unknown material '" + name + "'");
    MaterialPreset p = *chosen;
    p.geometry.optical_depth = cfg.get_double(s, "optical_depth", p.geometry.optical_depth);
    p.geometry.mode_area = cfg.get_double(s, "mode_area", p.geometry.mode_area);
    const std::string eta_s = cfg.get_string(s, "eta", "optimal");
    PlanResult r;
    if (eta_s == "optimal") {
        r = plan_optimal(p.material, p.geometry);
    } else {
        double eta = 0;
        if (!detail::parse_double(eta_s, eta))
            throw ConfigError(Config::where(s, "eta"), "expected a number or 'optimal', got '" + eta_s + "'");
        r = plan(p.material, p.geometry, eta);
    }
    if (r.beyond_optimum) t.add_meta("warning", "eta exceeds twice the optimal value");
    t.columns = detail::plan_columns();
    t.rows.push_back(detail::plan_row(r, p.material));
    detail::finish_meta(t, cfg);
    return res;
}

/// Exact posterior versus closed form over a desk-scale grid; the gate
/// fails if any cell exceeds its tolerance.
inline CommandResult cmd_oracle_report(Config& cfg, const RunOptions& opt) {
    const std::string s = "oracle";
    cfg.require_known(s, {"n_atoms", "i0", "strength", "x_t", "offsets", "rel_tol", "phi_sqrt_n_coeff", "jx_mode"});
    CommandResult res;
    Table& t = res.table;
    detail::start_meta(t, "oracle-report");
    CompareGrid g;
    std::vector<double> ns;
    for (auto n : g.n_atoms) ns.push_back(static_cast<double>(n));
    ns = cfg.get_list(s, "n_atoms", ns);
    g.n_atoms.clear();
    for (double n : ns) {
        if (!(n >= 1 && n == std::round(n))) throw ConfigError(Config::where(s, "n_atoms"), "expected positive integers");
        g.n_atoms.push_back(static_cast<std::int64_t>(n));
    }
    g.i0 = cfg.get_list(s, "i0", g.i0);
    g.strength = cfg.get_list(s, "strength", g.strength);
    g.x_t = cfg.get_list(s, "x_t", g.x_t, true);
    g.offsets = cfg.get_list(s, "offsets", g.offsets);
    g.rel_tol = cfg.get_double(s, "rel_tol", g.rel_tol);
    g.phi_sqrt_n_coeff = cfg.get_double(s, "phi_sqrt_n_coeff", g.phi_sqrt_n_coeff);
    g.jx_mode = detail::parse_jx_mode(cfg, s);

    const auto rep = compare_report(g, opt.threads);
    t.columns = {"n_atoms", "i0",      "strength",  "x_t",       "off_alpha", "off_beta", "phi",
                 "i_alpha", "i_beta",  "xi_closed", "xi_oracle", "rel_err",   "tol",      "pass"};
    for (const auto& r : rep.rows)
        t.rows.push_back({r.n_atoms, r.i0, r.strength, r.x_t, r.off_alpha, r.off_beta, r.phi, r.outcome.i_alpha,
                          r.outcome.i_beta, r.xi_closed, r.xi_oracle, r.rel_err, r.tol, r.pass});
    t.add_meta("max_rel_err", rep.max_rel_err);
    t.add_meta("n_cells", std::to_string(rep.rows.size()));
    t.add_meta("n_fail", std::to_string(rep.n_fail));
    t.add_meta("gate", rep.pass() ? "pass" : "fail");
    res.gate_failed = !rep.pass();
    detail::finish_meta(t, cfg);
    return res;
}

/// Monte Carlo outcomes and the conditional xi^2 of each.
inline CommandResult cmd_sample(Config& cfg, const RunOptions& opt) {
    const std::string s = "sample";
    cfg.require_known(s, {"n_atoms", "i0", "strength", "phi", "x_t", "n_samples", "method", "convention", "jx_mode"});
    CommandResult res;
    Table& t = res.table;
    detail::start_meta(t, s);
    const std::int64_t n = cfg.get_int(s, "n_atoms", 400);
    const double i0 = detail::positive(cfg, s, "i0", 100);
    if (n < 1) throw ConfigError(Config::where(s, "n_atoms"), "must be >= 1");
    double phi;
    if (cfg.has(s, "phi")) {
        phi = cfg.get_double(s, "phi", 0);
    } else {
        const double strength = detail::positive(cfg, s, "strength", 4);
        phi = std::sqrt(strength / (2.0 * i0 * static_cast<double>(n)));
    }
    const double x = cfg.get_angle(s, "x_t", std::numbers::pi / 4);
    const std::int64_t n_samples = cfg.get_int(s, "n_samples", 1000);
    if (n_samples < 0) throw ConfigError(Config::where(s, "n_samples"), "must be >= 0");
    const auto method = detail::parse_method(cfg, s);
    const auto conv = detail::parse_convention(cfg, s);
    const auto jx = detail::parse_jx_mode(cfg, s);

    const EnsembleSpec ens{n, phi};
    const auto dist = conditional_xi_distribution(ens, make_probe(i0, x, kThetaCosSin, conv),
                                                  static_cast<std::size_t>(n_samples), opt.seed, method,
                                                  opt.threads, jx);
    t.add_meta("seed", std::to_string(opt.seed));
    t.add_meta("rng", kRngAlgorithm);
    t.add_meta("phi", phi);
    t.add_meta("xi_sq.min", dist.summary.min);
    t.add_meta("xi_sq.q25", dist.summary.q25);
    t.add_meta("xi_sq.median", dist.summary.median);
    t.add_meta("xi_sq.q75", dist.summary.q75);
    t.add_meta("xi_sq.max", dist.summary.max);
    t.columns = {"index", "i_alpha", "i_beta", "xi_sq"};
    for (std::size_t i = 0; i < dist.samples.size(); ++i) {
        const auto& smp = dist.samples[i];
        t.rows.push_back({static_cast<std::int64_t>(i), smp.outcome.i_alpha, smp.outcome.i_beta, smp.xi_sq});
    }
    detail::finish_meta(t, cfg);
    return res;
}

}  // namespace spinsq
