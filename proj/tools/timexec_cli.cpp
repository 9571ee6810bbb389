// Command-line front end: reads a JSON scenario config, computes the optimal
// schedule through the configured solution layer, and writes schedule.csv,
// report.json and (for sweeps) sweep.csv into the output directory.
//
// Exit codes: 0 success, 2 config error, 3 solver failure, 1 I/O failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "timexec/errors.hpp"
#include "timexec/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path);
    if (!in) return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return true;
}

bool write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return static_cast<bool>(out);
}

int run_command(const std::string& config_path, const std::string& out_dir) {
    std::string text;
    if (!read_file(config_path, text)) {
        std::cerr << "config: cannot open '" << config_path << "'\n";
        return kExitConfig;
    }

    timexec::ScenarioOutput result;
    try {
        const timexec::ScenarioConfig cfg = timexec::parse_scenario(text);
        result = timexec::run_scenario(cfg);
    } catch (const timexec::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const timexec::infeasible_error& e) {
        std::cerr << "solver failure (infeasible): " << e.what() << "\n";
        return kExitSolver;
    } catch (const timexec::not_implemented_error& e) {
        std::cerr << "solver failure (not implemented): " << e.what() << "\n";
        return kExitSolver;
    } catch (const timexec::numerical_error& e) {
        std::cerr << "solver failure (numerical): " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "output: cannot create directory '" << out_dir << "': " << ec.message()
                  << "\n";
        return kExitIo;
    }
    const fs::path dir(out_dir);
    if (!write_file(dir / "schedule.csv", result.schedule_csv) ||
        !write_file(dir / "report.json", result.report_json) ||
        (result.sweep_csv && !write_file(dir / "sweep.csv", *result.sweep_csv))) {
        std::cerr << "output: cannot write files in '" << out_dir << "'\n";
        return kExitIo;
    }
    return kExitOk;
}

int validate_command(const std::string& config_path) {
    std::string text;
    if (!read_file(config_path, text)) {
        std::cerr << "config: cannot open '" << config_path << "'\n";
        return kExitConfig;
    }
    const std::vector<std::string> diags = timexec::scenario_diagnostics(text);
    if (diags.empty()) {
        std::cout << "ok\n";
        return kExitOk;
    }
    for (const auto& d : diags) std::cout << d << "\n";
    return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "timexec: optimal execution schedules under transient price impact.\n"
        "Set TIMEXEC_QUAD_GRID to override the default quadrature grid size (400)\n"
        "when the config does not set one."};
    app.require_subcommand(1);

    std::string config_path, out_dir;

    CLI::App* run = app.add_subcommand("run", "compute a schedule from a config file");
    run->add_option("config", config_path, "JSON scenario config")->required();
    run->add_option("--out", out_dir, "output directory for schedule.csv / report.json")
        ->required();

    CLI::App* validate =
        app.add_subcommand("validate", "check a config file and list its problems");
    validate->add_option("config", config_path, "JSON scenario config")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return run_command(config_path, out_dir);
    return validate_command(config_path);
}
