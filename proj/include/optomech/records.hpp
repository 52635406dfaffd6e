#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "optomech/experiments.hpp"
#include "optomech/linear_dynamics.hpp"
#include "optomech/pump_geometry.hpp"
#include "optomech/steady_state.hpp"
#include "optomech/units.hpp"

namespace optomech {

inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::ordered_json;
using Echo = std::vector<std::pair<std::string, std::string>>;

/// "%.17g": shortest text that round-trips every double.
std::string format_double(double v);

/// 17 significant digits in scientific notation, the CSV cell format.
std::string format_sci(double v);

Echo echo(const ModelParams& m);
Echo echo(const PhysicalParams& p);

/// "# optomech <version>" followed by one commented `key = value` per entry.
std::string header_block(const std::string& title, const Echo& parameters);

/// `[model]` section that parse_config() reads back to the same ModelParams.
std::string model_record(const ModelParams& m);

/// `key = value` record for one fixed point, `index` numbering bistable branches.
std::string steady_record(const ClassicalSteadyState& s, std::size_t index);

/// Row-major whitespace-separated grid, full precision.
std::string matrix_grid(const Matrix6& M);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const;
};

CsvTable power_sweep_table(const PowerSweepResult& r);
CsvTable squeezing_sweep_table(const SqueezingSweepResult& r);
CsvTable landscape_table(const LandscapeResult& r);
CsvTable field_table(const std::vector<FieldSample>& samples);

Json to_json(const ModelParams& m);
Json to_json(const ClassicalSteadyState& s);
Json to_json(const PowerSweepResult& r);
Json to_json(const SqueezingSweepResult& r);
Json to_json(const LandscapeResult& r);

/// Gnuplot "nonuniform matrix" layout of n2 over (omega2 columns, omega1 rows);
/// excluded and unstable cells are written as NaN.
std::string landscape_matrix(const LandscapeResult& r, const std::vector<double>& omega1,
                             const std::vector<double>& omega2);

}  // namespace optomech
