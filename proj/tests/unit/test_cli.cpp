#include "catch_amalgamated.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "optomech/cli.hpp"
#include "optomech/diagnostics.hpp"
#include "optomech/records.hpp"

using namespace optomech;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::StartsWith;
using Catch::Matchers::WithinRel;
namespace fs = std::filesystem;

namespace {

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("optomech_test_" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name) << text;
        return path / name;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Non-comment lines of a CSV file, split on commas.
std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        out.push_back(cells);
    }
    return out;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    FAIL("missing column " << name);
    return 0;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(OPTOMECH_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct RunResult {
    int code;
    std::string out, err;
};

RunResult run_in_process(RunConfig c) {
    std::ostringstream out, err;
    const int code = run(c, out, err);
    return {code, out.str(), err.str()};
}

const std::string kUncoupled = R"([model]
omega1   = 10
omega2   = 3.4
gamma1   = 1e-3
gamma2   = 1e-6
g1       = 0
g2       = 0
chi      = 0
n1       = 12.5
n2       = 3000
drive    = 1e9
detuning = -5
)";

const std::string kPhysical = R"([physical]
wavelength       = 1064 nm
cavity_length    = 0.5 cm
cavity_decay     = 50 kHz
mirror_mass      = 40 ng
mirror_freq      = 1 MHz
mirror_damping   = 140 Hz
sphere_radius    = 0.5 um
sphere_density   = 2650 kg/m^3
refractive_index = 1.5
sphere_freq      = 200 kHz
sphere_damping   = 0.5 mHz
cavity_waist     = 40 um
bath_temp_mirror = 50 mK
bath_temp_sphere = 1 K
input_power      = 0 W
detuning         = -1.36 MHz
)";

}  // namespace

TEST_CASE("fig3 preset sweep starts at the bare frequencies", "[cli]") {
    TempDir dir;
    RunConfig c;
    c.subcommand = "sweep";
    c.preset = Preset::fig3;
    c.output_dir = dir.path;
    const auto r = run_in_process(c);
    REQUIRE(r.code == exit_ok);
    const auto rows = csv_rows(dir.path / "power_sweep.csv");
    REQUIRE(rows.size() > 2);
    const auto& h = rows[0];
    const auto& zero = rows[1];
    CHECK(std::stod(zero[column(h, "drive")]) == 0.0);
    CHECK_THAT(std::stod(zero[column(h, "cavity_freq")]), WithinRel(27.2, 1e-6));
    CHECK_THAT(std::stod(zero[column(h, "mirror_freq")]), WithinRel(10.0, 1e-6));
    CHECK_THAT(std::stod(zero[column(h, "sphere_freq")]), WithinRel(3.4, 1e-6));
    // 17 significant digits in scientific notation.
    CHECK(zero[column(h, "cavity_freq")].size() == std::string("2.7199999999999999e+01").size());
    const auto j = nlohmann::json::parse(slurp(dir.path / "power_sweep.json"));
    CHECK(j.contains("threshold"));
    CHECK(j.contains("hybridization"));
    CHECK(j["meta"]["version"] == kVersion);
}

TEST_CASE("linear on an uncoupled model returns the bath occupations", "[cli]") {
    TempDir dir;
    RunConfig c;
    c.subcommand = "linear";
    c.input = dir.write("uncoupled.conf", kUncoupled);
    c.output_dir = dir.path / "out";
    const auto r = run_in_process(c);
    REQUIRE(r.code == exit_ok);
    const auto j = nlohmann::json::parse(slurp(c.output_dir / "linear.json"));
    CHECK_THAT(j["n1"].get<double>(), WithinRel(12.5, 1e-6));
    CHECK_THAT(j["n2"].get<double>(), WithinRel(3000.0, 1e-6));
    for (const char* f : {"drift.txt", "diffusion.txt", "eigenvalues.csv", "covariance.txt", "linear.txt"})
        CHECK(fs::exists(c.output_dir / f));
}

TEST_CASE("exit codes", "[cli]") {
    TempDir dir;
    const std::string out = " -o " + (dir.path / "o").string();
    SECTION("missing mandatory key") {
        std::string text = kUncoupled;
        text.erase(text.find("chi"), text.find("n1") - text.find("chi"));
        const auto p = dir.write("missing.conf", text);
        CHECK(run_cli("linear -i " + p.string() + out) == exit_config);
        RunConfig c;
        c.subcommand = "linear";
        c.input = p;
        c.output_dir = dir.path / "o";
        const auto r = run_in_process(c);
        CHECK(r.code == exit_config);
        CHECK_THAT(r.err, ContainsSubstring("chi"));
    }
    SECTION("negative temperature") {
        std::string text = kPhysical;
        text.replace(text.find("= 1 K"), 5, "= -1 K");
        const auto p = dir.write("cold.conf", text);
        CHECK(run_cli("derive -i " + p.string() + out) == exit_config);
    }
    SECTION("unknown flag and unknown subcommand") {
        CHECK(run_cli("linear --bogus") == exit_config);
        CHECK(run_cli("frobnicate --preset fig3" + out) == exit_config);
    }
    SECTION("input required without a preset") {
        CHECK(run_cli("linear" + out) == exit_config);
    }
    SECTION("unstable working point") {
        std::string text = kUncoupled;
        text.replace(text.find("g1       = 0"), 12, "g1       = 1e-3");
        text.replace(text.find("chi      = 0"), 12, "chi      = 3.7e-3");
        text.replace(text.find("g2       = 0"), 12, "g2       = -2.4e-10");
        text.replace(text.find("drive    = 1e9"), 14, "drive    = 1e12");
        text.replace(text.find("detuning = -5"), 13, "detuning = 5");
        const auto p = dir.write("hot.conf", text);
        CHECK(run_cli("linear -i " + p.string() + out) == exit_physics);
    }
    SECTION("version") {
        CHECK(run_cli("--version") == exit_ok);
    }
}

TEST_CASE("every output file carries the header block", "[cli]") {
    TempDir dir;
    const auto p = dir.write("nominal.conf", kPhysical);
    for (const char* sub : {"derive", "steady", "linear"}) {
        RunConfig c;
        c.subcommand = sub;
        c.input = p;
        c.output_dir = dir.path / sub;
        REQUIRE(run_in_process(c).code == exit_ok);
    }
    int files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(dir.path)) {
        if (!entry.is_regular_file() || entry.path().extension() == ".conf") continue;
        ++files;
        INFO(entry.path());
        const std::string text = slurp(entry.path());
        if (entry.path().extension() == ".json") {
            const auto j = nlohmann::json::parse(text);
            CHECK(j["meta"]["version"] == kVersion);
            CHECK(j["meta"]["parameters"].contains("omega1"));
        } else {
            CHECK_THAT(text, StartsWith(std::string("# optomech ") + kVersion));
            CHECK_THAT(text, ContainsSubstring("# omega1 = "));
        }
    }
    CHECK(files >= 10);
    // The derived couplings of the nominal set.
    CHECK_THAT(slurp(dir.path / "derive" / "model.txt"), ContainsSubstring("g1"));
}

TEST_CASE("derive output reparses", "[cli]") {
    TempDir dir;
    RunConfig c;
    c.subcommand = "derive";
    c.input = dir.write("nominal.conf", kPhysical);
    c.output_dir = dir.path;
    REQUIRE(run_in_process(c).code == exit_ok);
    RunConfig again = c;
    again.subcommand = "steady";
    again.input = dir.path / "model.txt";
    again.output_dir = dir.path / "steady";
    CHECK(run_in_process(again).code == exit_ok);
}

TEST_CASE("outputs do not depend on the worker count", "[cli]") {
    TempDir dir;
    const auto p = dir.write("landscape.conf", kPhysical + R"([sweep]
kind           = landscape
omega1_min     = 8
omega1_max     = 12
omega1_points  = 2
omega2_min     = 2
omega2_max     = 6
omega2_points  = 3
detuning_points = 4
fraction_points = 4
)");
    const auto quiet = set_warning_handler([](const std::string&) {});
    std::vector<std::string> runs;
    for (int threads : {1, 3}) {
        RunConfig c;
        c.subcommand = "sweep";
        c.input = p;
        c.threads = threads;
        c.output_dir = dir.path / ("t" + std::to_string(threads));
        REQUIRE(run_in_process(c).code == exit_ok);
        runs.push_back(slurp(c.output_dir / "landscape.csv") + slurp(c.output_dir / "landscape.json") +
                       slurp(c.output_dir / "landscape_n2.dat"));
    }
    set_warning_handler(quiet);
    CHECK(runs[0] == runs[1]);
    CHECK(run_cli("sweep --preset fig3 -o " + (dir.path / "a").string()) == exit_ok);
    CHECK(run_cli("sweep --preset fig3 --threads 2 -o " + (dir.path / "b").string()) == exit_ok);
    CHECK(slurp(dir.path / "a" / "power_sweep.csv") == slurp(dir.path / "b" / "power_sweep.csv"));
    CHECK(slurp(dir.path / "a" / "power_sweep.json") == slurp(dir.path / "b" / "power_sweep.json"));
}

TEST_CASE("output format selection", "[cli]") {
    TempDir dir;
    RunConfig c;
    c.subcommand = "sweep";
    c.preset = Preset::fig4;
    c.format = OutputFormat::csv;
    c.output_dir = dir.path;
    REQUIRE(run_in_process(c).code == exit_ok);
    CHECK(fs::exists(dir.path / "squeezing_sweep.csv"));
    CHECK_FALSE(fs::exists(dir.path / "squeezing_sweep.json"));
}

TEST_CASE("geometry and validate subcommands", "[cli]") {
    TempDir dir;
    const auto p = dir.write("geometry.conf", "[geometry]\nvariant = symmetric\nwavelength = 1064 nm\n"
                                               "cavity_length = 5 mm\nreflectivity = 0.9\nsamples = 101\n"
                                               "[validate]\ninstances = 20\nseed = 9\n");
    RunConfig g;
    g.subcommand = "geometry";
    g.input = p;
    g.output_dir = dir.path / "g";
    REQUIRE(run_in_process(g).code == exit_ok);
    CHECK(csv_rows(g.output_dir / "field.csv").size() == 102);

    RunConfig v = g;
    v.subcommand = "validate";
    v.output_dir = dir.path / "v";
    const auto r = run_in_process(v);
    CHECK(r.code == exit_ok);
    const auto j = nlohmann::json::parse(slurp(v.output_dir / "validate.json"));
    CHECK(j["passed"] == true);
}
