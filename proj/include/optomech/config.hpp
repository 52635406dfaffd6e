#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "optomech/experiments.hpp"
#include "optomech/pump_geometry.hpp"
#include "optomech/units.hpp"

namespace optomech {

enum class SweepKind { power, squeezing, landscape };

struct SweepConfig {
    SweepKind kind = SweepKind::power;
    PowerGrid power;          // drive |a_in|^2, already converted from watts
    LandscapeSpec landscape;  // family filled in from [physical]
};

struct GeometryConfig {
    PumpGeometry variant = PumpGeometry::from_fixed_mirror;
    CavitySpec cavity;
    int samples = 1001;
};

struct ValidateConfig {
    int instances = 1000;
    std::uint64_t seed = 20140101;
};

/// Parsed configuration file. Each section is optional; the subcommand decides
/// which ones it needs.
struct RunInput {
    std::optional<PhysicalParams> physical;
    DetuningSpec physical_detuning;                  // rad/s
    std::optional<PumpGeometry> physical_geometry;   // applied to chi when set
    std::optional<ModelParams> model;
    std::optional<SweepConfig> sweep;
    std::optional<GeometryConfig> geometry;
    std::optional<ValidateConfig> validate;
};

/// Strict parser for the sectioned `key = value` format:
///
///   [physical]   SI quantities with mandatory unit suffixes (1064 nm, 40 ng, 1 MHz)
///   [model]      dimensionless model quantities, no units
///   [sweep]      power / squeezing / landscape protocols
///   [geometry]   Fabry-Perot field profile
///   [validate]   oracle cross-check settings
///
/// `#` starts a comment. Unknown sections or keys, duplicates, missing
/// mandatory keys and invariant violations raise ConfigError carrying the line
/// number and key.
RunInput parse_config(const std::string& text);
RunInput load_config(const std::filesystem::path& path);

/// Model for the run: [model] when present, otherwise [physical] converted to
/// model units with the pump geometry applied. ConfigError when neither exists.
ModelParams resolve_model(const RunInput& input);

/// Value in SI base units (rad/s for frequencies) of a quantity such as
/// "1.5 MHz" or "50 mK". `dimension` is one of length, mass, frequency,
/// temperature, power, density.
double parse_quantity(const std::string& text, const std::string& dimension);

std::string to_string(SweepKind kind);

}  // namespace optomech
