// spinsq - batch front end: figure sweeps, parameter table, oracle report,
// Monte Carlo sampling and the planner.
//
// Exit codes: 0 ok, 2 config error, 3 numeric-domain error, 4 gate failure.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "spinsq/report/commands.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumeric = 3, kGate = 4 };

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Four-color QND spin-squeezing simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_path;
    std::uint64_t seed = spinsq::RunOptions{}.seed;
    unsigned threads = 1;
    std::string format = "csv";

    app.add_option("--config", config_path, "INI configuration file")->envname("SPINSQ_CONFIG");
    app.add_option("--out", out_path, "output file (default: stdout)")->envname("SPINSQ_OUT");
    app.add_option("--seed", seed, "root RNG seed")->envname("SPINSQ_SEED");
    app.add_option("--threads", threads, "worker threads, 0 = all cores")->envname("SPINSQ_THREADS");
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json", "text"}))
        ->envname("SPINSQ_FORMAT");

    using Cmd = std::function<spinsq::CommandResult(spinsq::Config&, const spinsq::RunOptions&)>;
    const std::map<std::string, std::pair<std::string, Cmd>> commands{
        {"fig3", {"xi^2 over the outcome plane (closed form)", spinsq::cmd_fig3}},
        {"fig4", {"xi'^2 versus scattering probability", spinsq::cmd_fig4}},
        {"table1", {"parameter table for the Eu and Pr presets", spinsq::cmd_table1}},
        {"oracle-report", {"exact posterior versus closed form; exit 4 if the gate fails",
                           spinsq::cmd_oracle_report}},
        {"sample", {"Monte Carlo outcomes and conditional xi^2", spinsq::cmd_sample}},
        {"plan", {"experimental parameter chain for one material", spinsq::cmd_plan}},
    };
    for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        spinsq::Config cfg = config_path.empty() ? spinsq::Config{} : spinsq::Config::from_file(config_path);
        const spinsq::RunOptions opt{seed, threads};
        const std::string name = app.get_subcommands().front()->get_name();
        const auto result = commands.at(name).second(cfg, opt);

        const auto fmt = format == "json"   ? spinsq::OutputFormat::json
                         : format == "text" ? spinsq::OutputFormat::text
                                            : spinsq::OutputFormat::csv;
        const std::string text = spinsq::render(result.table, fmt);
        if (out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw spinsq::ConfigError("--out", "cannot open '" + out_path + "' for writing");
            out << text;
        }
        if (result.gate_failed) {
            std::cerr << "spinsq: acceptance gate failed (see n_fail / max_rel_err in the output metadata)\n";
            return kGate;
        }
        return kOk;
    } catch (const spinsq::ConfigError& e) {
        std::cerr << "spinsq: config error: " << e.what() << "\n";
        return kConfig;
    } catch (const spinsq::DomainError& e) {
        std::cerr << "spinsq: numeric domain error: " << e.what() << "\n";
        return kNumeric;
    } catch (const spinsq::SeriesOverflow& e) {
        std::cerr << "spinsq: numeric domain error: " << e.what() << "\n";
        return kNumeric;
    } catch (const spinsq::SizeError& e) {
        std::cerr << "spinsq: numeric domain error: " << e.what() << "\n";
        return kNumeric;
    }
}
