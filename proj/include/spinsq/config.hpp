// config.hpp - INI-style configuration with per-field diagnostics and an
// echo of every value actually used (defaults included)
#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "errors.hpp"
#include "planner.hpp"

namespace spinsq {

namespace detail {

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto [p, ec] = std::from_chars(first, t.data() + t.size(), out);
    return ec == std::errc{} && p == t.data() + t.size();
}

/// Plain number, or a multiple of pi: "pi", "pi/8", "3*pi/8", "-0.5pi".
inline bool parse_angle(const std::string& text, double& out) {
    if (parse_double(text, out)) return true;
    static const std::regex re(R"(^\s*([+-]?[0-9]*\.?[0-9]*(?:[eE][+-]?[0-9]+)?)\s*\*?\s*pi\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*$)",
                               std::regex::icase);
    std::smatch mt;
    if (!std::regex_match(text, mt, re)) return false;
    double coef = 1.0, den = 1.0;
    const std::string c = mt[1].str();
    if (c == "-") coef = -1.0;
    else if (!c.empty() && c != "+" && !parse_double(c, coef)) return false;
    if (mt[2].matched && !parse_double(mt[2].str(), den)) return false;
    if (den == 0.0) return false;
    out = coef * std::numbers::pi / den;
    return true;
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

inline std::string format_double(double x) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc{} ? std::string(buf, p) : std::to_string(x);
}

}  // namespace detail

class Config {
public:
    Config() = default;

    static Config from_string(const std::string& text, const std::string& origin = "<string>") {
        Config c;
        std::istringstream is(text);
        try {
            boost::property_tree::ini_parser::read_ini(is, c.tree_);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ConfigError(origin + " line " + std::to_string(e.line()), e.message());
        }
        return c;
    }

    static Config from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError(path, "cannot open config file");
        std::stringstream ss;
        ss << in.rdbuf();
        Config c = from_string(ss.str(), path);
        c.dir_ = std::filesystem::path(path).parent_path();
        return c;
    }

    /// Relative paths named inside a config file are taken from its directory.
    std::string resolve(const std::string& path) const {
        const std::filesystem::path p(path);
        return p.is_absolute() || dir_.empty() ? path : (dir_ / p).string();
    }

    bool has(const std::string& section, const std::string& key) const {
        return raw(section, key).has_value();
    }

    std::vector<std::string> sections() const {
        std::vector<std::string> out;
        for (const auto& [name, sub] : tree_)
            if (!sub.empty()) out.push_back(name);
        return out;
    }

    /// Reject keys of `section` outside `known`.
    void require_known(const std::string& section, const std::set<std::string>& known) const {
        const auto sub = tree_.get_child_optional(section);
        if (!sub) return;
        for (const auto& [key, _] : *sub)
            if (!known.count(key)) throw ConfigError(where(section, key), "unknown key");
    }

    double get_double(const std::string& section, const std::string& key, double def) {
        return get_parsed(section, key, def, detail::parse_double, "a number");
    }

    double get_angle(const std::string& section, const std::string& key, double def) {
        return get_parsed(section, key, def, detail::parse_angle, "an angle (number or k*pi/n)");
    }

    std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t def) {
        const double d = get_parsed(section, key, static_cast<double>(def), detail::parse_double,
                                    "an integer");
        const double v = std::round(d);
        if (v != d || std::abs(v) > 9e15) throw ConfigError(where(section, key), "expected an integer");
        return static_cast<std::int64_t>(v);
    }

    std::string get_string(const std::string& section, const std::string& key, const std::string& def) {
        const auto r = raw(section, key);
        const std::string v = r ? detail::trim(*r) : def;
        record(section, key, v);
        return v;
    }

    std::vector<double> get_list(const std::string& section, const std::string& key,
                                 const std::vector<double>& def, bool angles = false) {
        const auto r = raw(section, key);
        std::vector<double> out;
        if (!r) {
            out = def;
        } else {
            for (const auto& item : detail::split_list(*r)) {
                double v = 0;
                const bool ok = angles ? detail::parse_angle(item, v) : detail::parse_double(item, v);
                if (!ok) throw ConfigError(where(section, key), "cannot parse list item '" + item + "'");
                out.push_back(v);
            }
        }
        std::string echo;
        for (std::size_t i = 0; i < out.size(); ++i)
            echo += (i ? "," : "") + detail::format_double(out[i]);
        record(section, key, echo);
        return out;
    }

    /// Every (section.key, value) read so far, in first-use order.
    const std::vector<std::pair<std::string, std::string>>& echo() const noexcept { return echo_; }

    static std::string where(const std::string& section, const std::string& key) {
        return "[" + section + "] " + key;
    }

private:
    std::optional<std::string> raw(const std::string& section, const std::string& key) const {
        const auto sub = tree_.get_child_optional(section);
        if (!sub) return std::nullopt;
        const auto v = sub->get_optional<std::string>(boost::property_tree::ptree::path_type(key, '\0'));
        if (!v) return std::nullopt;
        return *v;
    }

    template <class Parse>
    double get_parsed(const std::string& section, const std::string& key, double def, Parse parse,
                      const char* expected) {
        const auto r = raw(section, key);
        double v = def;
        if (r && !parse(*r, v))
            throw ConfigError(where(section, key), std::string("expected ") + expected + ", got '" +
                                                       detail::trim(*r) + "'");
        record(section, key, detail::format_double(v));
        return v;
    }

    void record(const std::string& section, const std::string& key, const std::string& value) {
        const std::string name = section + "." + key;
        for (const auto& e : echo_)
            if (e.first == name) return;
        echo_.emplace_back(name, value);
    }

    boost::property_tree::ptree tree_;
    std::filesystem::path dir_;
    std::vector<std::pair<std::string, std::string>> echo_;
};

/// One section per material; keys molar_mass, doping, absorption,
/// usable_ratio, host_density, mode_area, optical_depth.
inline std::vector<MaterialPreset> load_materials(Config& cfg) {
    std::vector<MaterialPreset> out;
    for (const auto& name : cfg.sections()) {
        cfg.require_known(name, {"molar_mass", "doping", "absorption", "usable_ratio",
                                 "host_density", "mode_area", "optical_depth"});
        for (const char* key : {"molar_mass", "doping", "absorption", "optical_depth"})
            if (!cfg.has(name, key)) throw ConfigError(Config::where(name, key), "required key missing");
        MaterialPreset p;
        p.material.name = name;
        p.material.molar_mass = cfg.get_double(name, "molar_mass", 0);
        p.material.doping = cfg.get_double(name, "doping", 0);
        p.material.absorption = cfg.get_double(name, "absorption", 0);
        p.material.usable_ratio = cfg.get_double(name, "usable_ratio", kDefaultUsableRatio);
        p.material.host_density = cfg.get_double(name, "host_density", kYsoDensity);
        p.geometry.mode_area = cfg.get_double(name, "mode_area", kDefaultModeArea);
        p.geometry.optical_depth = cfg.get_double(name, "optical_depth", 0);
        out.push_back(p);
    }
    return out;
}

inline std::vector<MaterialPreset> load_materials_file(const std::string& path) {
    auto cfg = Config::from_file(path);
    return load_materials(cfg);
}

}  // namespace spinsq
