#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using eur::cli::CommandResult;
using eur::cli::RunConfig;

int run(const std::string& command, const std::string& config_path,
        const std::optional<std::uint64_t>& seed, const std::string& out_dir,
        const std::string& format) {
    RunConfig config;
    try {
        if (!config_path.empty()) config = eur::cli::load_config(config_path);
    } catch (const eur::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return eur::cli::kConfigFailure;
    }
    if (seed) config.seed = *seed;
    config.out_dir = out_dir;
    if (format == "csv") config.formats = {eur::io::ReportFormat::Csv};
    if (format == "jsonl") config.formats = {eur::io::ReportFormat::JsonLines};

    CommandResult result;
    try {
        if (command == "certify") result = eur::cli::cmd_certify(config);
        else if (command == "fig1") result = eur::cli::cmd_fig1(config);
        else if (command == "sweep") result = eur::cli::cmd_sweep(config);
        else result = eur::cli::cmd_continuum(config);
    } catch (const eur::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return eur::cli::kConfigFailure;
    } catch (const eur::InvalidS& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return eur::cli::kConfigFailure;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return eur::cli::kNumericalFailure;
    }

    try {
        eur::cli::write_outputs(config.out_dir, result.files);
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return eur::cli::kNumericalFailure;
    }
    std::cout << result.summary;
    if (!result.all_hold) {
        std::cerr << "some relations failed\n";
        return eur::cli::kSomeFail;
    }
    return eur::cli::kAllHold;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certify entropic uncertainty relations for the complement-of-Hamiltonian measurement"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::string format = "both";

    for (const char* name : {"certify", "fig1", "sweep", "continuum"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "random seed (overrides the config)");
        sub->add_option("--out-dir", out_dir, "output directory");
        sub->add_option("--format", format, "report format")
            ->check(CLI::IsMember({"csv", "jsonl", "both"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : eur::cli::kConfigFailure;
    }
    return run(app.get_subcommands().front()->get_name(), config_path, seed, out_dir, format);
}
