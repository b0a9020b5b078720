#include "cellcap/sweep.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int exit_config = 2;
constexpr int exit_io = 3;

std::optional<std::uint64_t> env_seed()
{
    const char* v = std::getenv("CELLCAP_SEED");
    if (!v || !*v)
        return std::nullopt;
    try {
        std::size_t pos = 0;
        const unsigned long long s = std::stoull(v, &pos);
        if (pos != std::string(v).size())
            throw std::invalid_argument(v);
        return s;
    } catch (const std::exception&) {
        throw cellcap::config_error("CELLCAP_SEED", "expected an unsigned integer");
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Delay and capacity sweeps for Poisson cellular networks under ARQ"};
    app.set_version_flag("--version", std::string(cellcap::sweep::tool_version));

    std::string config_path;
    std::string preset;
    std::string out;
    std::string format;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> realizations;
    std::optional<std::uint64_t> tmax;
    std::optional<unsigned> threads;
    bool validate_only = false;

    auto* cfg_opt = app.add_option("--config", config_path, "key = value configuration file");
    auto* preset_opt = app.add_option("--preset", preset, "built-in figure preset")
                           ->check(CLI::IsMember({"fig3", "fig4", "fig5", "fig6"}));
    cfg_opt->excludes(preset_opt);
    app.add_option("--out", out, "output path (default: stdout)");
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", seed, "RNG seed (fallback: CELLCAP_SEED)");
    app.add_option("--realizations", realizations, "realizations per density")->check(CLI::PositiveNumber);
    app.add_option("--tmax", tmax, "censoring horizon in slots")->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
    app.add_flag("--validate", validate_only, "check the configuration and print it normalized");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    using namespace cellcap;
    sweep::SweepSpec spec;
    try {
        if (!preset.empty())
            spec = sweep::load_preset(preset);
        else if (!config_path.empty())
            spec = sweep::load_config_file(config_path);
        else
            throw config_error("config", "one of --config or --preset is required");

        if (seed)
            spec.scenario.seed = *seed;
        else if (auto s = env_seed(); s && !spec.seed_in_config)
            spec.scenario.seed = *s;
        if (realizations)
            spec.scenario.n_realizations = *realizations;
        if (tmax)
            spec.scenario.max_slots = *tmax;
        if (threads)
            spec.scenario.threads = *threads;
        if (!out.empty())
            spec.out = out;
        if (format == "csv")
            spec.format = sweep::Format::csv;
        else if (format == "json")
            spec.format = sweep::Format::json;

        sweep::validate_config(spec);
        if (validate_only) {
            std::cout << sweep::normalized_echo(spec);
            return 0;
        }

        const auto rows = sweep::run_sweep(spec);
        if (spec.out.empty()) {
            if (spec.format == sweep::Format::csv)
                sweep::write_csv(std::cout, spec, rows);
            else
                sweep::write_json(std::cout, spec, rows);
        } else {
            sweep::write_output(spec, rows);
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const request_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const io_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return exit_io;
    }
    return 0;
}
