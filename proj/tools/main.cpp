#include "experiments.hpp"

#include "minent/csv.hpp"
#include "minent/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace minent::lab {

namespace {

RunContext context_for(const Config& cfg, const std::string& out_override,
                       std::uint64_t seed_override, bool seed_given, long grid_override,
                       bool grid_given) {
    RunContext ctx;
    const std::string kind = cfg.text("experiment", "kind");
    ctx.out_dir = out_override.empty() ? cfg.text_or("experiment", "out", "out/" + kind)
                                       : out_override;
    ctx.seed = seed_given ? seed_override
                          : std::uint64_t(cfg.integer_or("experiment", "seed", 1));
    ctx.grid = grid_given ? grid_override : cfg.integer_or("experiment", "grid", 10000);
    ctx.plots = cfg.flag_or("experiment", "plots", false);
    return ctx;
}

int run_once(const Config& cfg, const RunContext& ctx) {
    const Outcome outcome = run_experiment(cfg, ctx);
    for (const std::string& line : outcome.lines) std::cout << line << "\n";
    if (!outcome.pass) {
        std::cerr << "check failed: " << outcome.failed_invariant << "\n";
        return 2;
    }
    std::cout << "PASS (" << ctx.out_dir.string() << ")\n";
    return 0;
}

std::pair<std::string, std::string> split_param(const Config& cfg, const std::string& param) {
    const auto dot = param.find('.');
    if (dot != std::string::npos) return {param.substr(0, dot), param.substr(dot + 1)};
    // Bare key: apply to the section named after the experiment kind.
    return {cfg.text("experiment", "kind"), param};
}

} // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for entropy bounds and curvature-pinched surgeries"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    long grid = 0;
    std::string param;
    std::string values_text;

    CLI::App* run = app.add_subcommand("run", "run one experiment from a config file");
    run->add_option("config", config_path, "config file path")->required();
    run->add_option("--out", out_dir, "output directory");
    CLI::Option* run_seed = run->add_option("--seed", seed, "master seed");
    CLI::Option* run_grid = run->add_option("--grid", grid, "grid resolution");

    CLI::App* sweep = app.add_subcommand("sweep", "repeat an experiment over parameter values");
    sweep->add_option("config", config_path, "config file path")->required();
    sweep->add_option("--param", param, "parameter to vary (section.key or key)")->required();
    sweep->add_option("--values", values_text, "comma separated values")->required();
    sweep->add_option("--out", out_dir, "output directory");
    CLI::Option* sweep_seed = sweep->add_option("--seed", seed, "master seed");
    CLI::Option* sweep_grid = sweep->add_option("--grid", grid, "grid resolution");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        Config cfg = Config::parse_file(config_path);

        if (run->parsed()) {
            const RunContext ctx = context_for(cfg, out_dir, seed, run_seed->count() > 0, grid,
                                               run_grid->count() > 0);
            return run_once(cfg, ctx);
        }

        // sweep
        std::vector<double> values;
        {
            std::istringstream is(values_text);
            std::string item;
            while (std::getline(is, item, ',')) {
                if (!item.empty()) values.push_back(std::stod(item));
            }
        }
        if (values.empty()) {
            std::cerr << "sweep: empty value list\n";
            return 1;
        }
        const auto [section, key] = split_param(cfg, param);
        const RunContext base = context_for(cfg, out_dir, seed, sweep_seed->count() > 0, grid,
                                            sweep_grid->count() > 0);

        std::ostringstream sweep_csv;
        bool header_written = false;
        int status = 0;
        for (double value : values) {
            Config point = cfg;
            point.set(section, key, value);
            RunContext ctx = base;
            ctx.out_dir = base.out_dir / (key + "=" + csv::num(value));
            const Outcome outcome = run_experiment(point, ctx);
            if (!outcome.pass) {
                std::cerr << key << "=" << csv::num(value)
                          << ": check failed: " << outcome.failed_invariant << "\n";
                status = 2;
            }
            if (!header_written) {
                sweep_csv << param;
                for (const auto& [name, v] : outcome.metrics) sweep_csv << "," << name;
                sweep_csv << "\n";
                header_written = true;
            }
            sweep_csv << csv::num(value);
            for (const auto& [name, v] : outcome.metrics) sweep_csv << "," << csv::num(v);
            sweep_csv << "\n";
        }
        std::filesystem::create_directories(base.out_dir);
        {
            const auto tmp = base.out_dir / "sweep.csv.tmp";
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << sweep_csv.str();
            out.close();
            std::filesystem::rename(tmp, base.out_dir / "sweep.csv");
        }
        std::cout << (status == 0 ? "PASS" : "FAIL") << " (" << base.out_dir.string()
                  << "/sweep.csv)\n";
        return status;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const InvalidParameter& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const NoSolution& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace minent::lab

int main(int argc, char** argv) { return minent::lab::cli_main(argc, argv); }
