#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "optomech/presets.hpp"

namespace optomech {

enum class OutputFormat { csv, json, both };

struct RunConfig {
    std::string subcommand;                     // derive | steady | linear | sweep | geometry | validate
    std::optional<std::filesystem::path> input;
    std::filesystem::path output_dir = ".";
    OutputFormat format = OutputFormat::both;
    Preset preset = Preset::none;
    int threads = 1;
};

/// Exit codes of run() and cli_main(). Bad command-line arguments count as
/// configuration errors.
enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_physics = 3, exit_numerical = 4 };

/// Executes one subcommand. Files go to `output_dir`; a short summary goes to
/// `out` and error text to `err`. Never throws.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Argument parsing plus run(). OPTOMECH_THREADS sets the default worker count.
int cli_main(int argc, char** argv);

}  // namespace optomech
