#include "optomech/records.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace optomech {

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string flag(bool b) { return b ? "1" : "0"; }

Json modes_json(const NormalModes& modes) {
    Json out = Json::array();
    for (const auto& m : modes.modes) out.push_back({{"frequency", m.frequency}, {"damping", m.damping}});
    return out;
}

Json threshold_json(const std::optional<ThresholdBracket>& t) {
    if (!t) return nullptr;
    return {{"stable_drive", t->stable_drive}, {"unstable_drive", t->unstable_drive}, {"estimate", t->estimate()}};
}

void append_modes(std::vector<std::string>& row, const NormalModes& modes) {
    for (const auto& m : modes.modes) {
        row.push_back(format_sci(m.frequency));
        row.push_back(format_sci(m.damping));
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

Echo echo(const ModelParams& m) {
    return {
        {"omega1", format_double(m.omega1)},
        {"omega2", format_double(m.omega2)},
        {"gamma1", format_double(m.gamma1)},
        {"gamma2", format_double(m.gamma2)},
        {"g1", format_double(m.g1)},
        {"g2", format_double(m.g2)},
        {"chi", format_double(m.chi)},
        {"drive", format_double(m.drive)},
        {"n1", format_double(m.n1)},
        {"n2", format_double(m.n2)},
        {"detuning_mode", to_string(m.detuning_mode)},
        {"detuning", format_double(m.detuning)},
    };
}

Echo echo(const PhysicalParams& p) {
    return {
        {"wavelength_m", format_double(p.wavelength)},
        {"cavity_length_m", format_double(p.cavity_length)},
        {"cavity_decay_rad_s", format_double(p.cavity_decay)},
        {"mirror_mass_kg", format_double(p.mirror_mass)},
        {"mirror_freq_rad_s", format_double(p.mirror_freq)},
        {"mirror_damping_rad_s", format_double(p.mirror_damping)},
        {"sphere_radius_m", format_double(p.sphere_radius)},
        {"sphere_density_kg_m3", format_double(p.sphere_density)},
        {"refractive_index", format_double(p.refractive_index)},
        {"sphere_freq_rad_s", format_double(p.sphere_freq)},
        {"sphere_damping_rad_s", format_double(p.sphere_damping)},
        {"cavity_waist_m", format_double(p.cavity_waist)},
        {"bath_temp_mirror_K", format_double(p.bath_temp_mirror)},
        {"bath_temp_sphere_K", format_double(p.bath_temp_sphere)},
        {"input_power_W", format_double(p.input_power)},
        {"sphere_site", to_string(p.sphere_site)},
    };
}

std::string header_block(const std::string& title, const Echo& parameters) {
    std::ostringstream out;
    out << "# optomech " << kVersion << "\n# " << title << "\n";
    for (const auto& [k, v] : parameters) out << "# " << k << " = " << v << "\n";
    return out.str();
}

std::string model_record(const ModelParams& m) {
    std::ostringstream out;
    out << "[model]\n";
    for (const auto& [k, v] : echo(m)) out << k << " = " << v << "\n";
    return out.str();
}

std::string steady_record(const ClassicalSteadyState& s, std::size_t index) {
    std::ostringstream out;
    out << "branch = " << index << "\n"
        << "a_bar_re = " << format_double(s.a_bar.real()) << "\n"
        << "a_bar_im = " << format_double(s.a_bar.imag()) << "\n"
        << "a_in_re = " << format_double(s.a_in.real()) << "\n"
        << "a_in_im = " << format_double(s.a_in.imag()) << "\n"
        << "photon_number = " << format_double(s.photon_number) << "\n"
        << "x1_bar = " << format_double(s.x1_bar) << "\n"
        << "x2_bar = " << format_double(s.x2_bar) << "\n"
        << "omega1_eff = " << format_double(s.omega1_eff) << "\n"
        << "omega2_eff = " << format_double(s.omega2_eff) << "\n"
        << "delta_eff = " << format_double(s.delta_eff) << "\n"
        << "delta_bare = " << format_double(s.delta_bare) << "\n";
    return out.str();
}

std::string matrix_grid(const Matrix6& M) {
    std::ostringstream out;
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) out << (j ? " " : "") << format_double(M(i, j));
        out << "\n";
    }
    return out.str();
}

std::string CsvTable::str() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << csv_escape(header[i]);
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(row[i]);
        out << "\n";
    }
    return out.str();
}

CsvTable power_sweep_table(const PowerSweepResult& r) {
    CsvTable t;
    t.header = {"drive", "stable", "cavity_freq", "cavity_damping", "mirror_freq", "mirror_damping",
                "sphere_freq", "sphere_damping", "n1", "n2"};
    for (const auto& row : r.rows) {
        std::vector<std::string> cells{format_sci(row.drive), flag(row.stable)};
        append_modes(cells, row.modes);
        cells.push_back(format_sci(row.n1));
        cells.push_back(format_sci(row.n2));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

CsvTable squeezing_sweep_table(const SqueezingSweepResult& r) {
    CsvTable t;
    t.header = {"drive", "stable", "var_x1", "var_p1", "var_x2", "var_p2", "S1", "S2"};
    for (const auto& row : r.rows) {
        t.rows.push_back({format_sci(row.drive), flag(row.stable), format_sci(row.var_x1), format_sci(row.var_p1),
                          format_sci(row.var_x2), format_sci(row.var_p2), format_sci(row.S1), format_sci(row.S2)});
    }
    return t;
}

CsvTable landscape_table(const LandscapeResult& r) {
    CsvTable t;
    t.header = {"omega1", "omega2", "excluded", "stable", "detuning", "drive", "threshold_fraction",
                "boundary_optimum", "n1", "n2", "S1", "S2", "thermal_n2",
                "cavity_freq", "cavity_damping", "mirror_freq", "mirror_damping", "sphere_freq", "sphere_damping",
                "g1", "g2", "chi", "n1_bath", "n2_bath"};
    const double nan = std::nan("");
    for (const auto& pt : r.points) {
        const bool ok = !pt.excluded && pt.stable;
        std::vector<std::string> cells{
            format_sci(pt.omega1), format_sci(pt.omega2), flag(pt.excluded), flag(ok),
            format_sci(ok ? pt.optimum.detuning : nan), format_sci(ok ? pt.params.drive : nan),
            format_sci(ok ? pt.optimum.power : nan), flag(pt.optimum.boundary_optimum),
            format_sci(ok ? pt.n1 : nan), format_sci(ok ? pt.n2 : nan), format_sci(ok ? pt.S1 : nan),
            format_sci(ok ? pt.S2 : nan), format_sci(pt.excluded ? nan : pt.thermal_n2)};
        append_modes(cells, pt.modes);
        for (double v : {pt.params.g1, pt.params.g2, pt.params.chi, pt.params.n1, pt.params.n2})
            cells.push_back(format_sci(pt.excluded ? nan : v));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

CsvTable field_table(const std::vector<FieldSample>& samples) {
    CsvTable t;
    t.header = {"z", "intensity"};
    for (const auto& s : samples) t.rows.push_back({format_sci(s.z), format_sci(s.intensity)});
    return t;
}

Json to_json(const ModelParams& m) {
    return {{"omega1", m.omega1}, {"omega2", m.omega2}, {"gamma1", m.gamma1}, {"gamma2", m.gamma2},
            {"g1", m.g1},         {"g2", m.g2},         {"chi", m.chi},       {"drive", m.drive},
            {"n1", m.n1},         {"n2", m.n2},         {"detuning_mode", to_string(m.detuning_mode)},
            {"detuning", m.detuning}};
}

Json to_json(const ClassicalSteadyState& s) {
    return {{"a_bar", {s.a_bar.real(), s.a_bar.imag()}},
            {"a_in", {s.a_in.real(), s.a_in.imag()}},
            {"photon_number", s.photon_number},
            {"x1_bar", s.x1_bar},
            {"x2_bar", s.x2_bar},
            {"omega1_eff", s.omega1_eff},
            {"omega2_eff", s.omega2_eff},
            {"delta_eff", s.delta_eff},
            {"delta_bare", s.delta_bare}};
}

Json to_json(const PowerSweepResult& r) {
    Json out;
    out["rows"] = r.rows.size();
    out["threshold"] = threshold_json(r.threshold);
    const auto& h = r.hybridization;
    if (h.found) {
        out["hybridization"] = {{"grid_row", h.index},
                                {"drive", h.drive},
                                {"separation", h.separation},
                                {"n1", h.n1},
                                {"n2", h.n2},
                                {"occupation_gap", h.occupation_gap},
                                {"equal_occupation_rows", h.equal_occupation_rows}};
    } else {
        out["hybridization"] = nullptr;
    }
    if (r.best_cooling_row) {
        const auto& row = r.rows[*r.best_cooling_row];
        out["best_cooling"] = {{"grid_row", *r.best_cooling_row}, {"drive", row.drive}, {"n1", row.n1},
                               {"n2", row.n2}, {"modes", modes_json(row.modes)}};
    } else {
        out["best_cooling"] = nullptr;
    }
    return out;
}

Json to_json(const SqueezingSweepResult& r) {
    Json out;
    out["rows"] = r.rows.size();
    out["threshold"] = threshold_json(r.threshold);
    if (r.maximum) {
        const auto& m = *r.maximum;
        out["maximum"] = {{"grid_row", m.index}, {"drive", m.drive}, {"S2", m.S2},
                          {"min_variance", m.min_variance}, {"momentum_squeezed", m.momentum_squeezed}};
        if (r.threshold) out["maximum"]["drive_over_threshold"] = m.drive / r.threshold->estimate();
    } else {
        out["maximum"] = nullptr;
    }
    return out;
}

Json to_json(const LandscapeResult& r) {
    Json out;
    out["points"] = r.points.size();
    Json ridge = Json::array();
    for (const auto& p : r.ridge) ridge.push_back({{"omega1", p.omega1}, {"omega2", p.omega2}, {"n2", p.n2}});
    out["ridge"] = ridge;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        const auto& p = r.points[i];
        if (p.excluded || !p.stable) continue;
        if (!best || p.n2 < r.points[*best].n2) best = i;
    }
    if (best) {
        const auto& p = r.points[*best];
        out["optimum"] = {{"omega1", p.omega1},
                          {"omega2", p.omega2},
                          {"detuning", p.optimum.detuning},
                          {"drive", p.params.drive},
                          {"threshold_fraction", p.optimum.power},
                          {"n2", p.n2},
                          {"thermal_n2", p.thermal_n2},
                          {"reduction", p.thermal_n2 / p.n2},
                          {"params", to_json(p.params)}};
    } else {
        out["optimum"] = nullptr;
    }
    Json failures = Json::array();
    for (const auto& p : r.points)
        if (!p.excluded && !p.optimum.diagnostic.empty())
            failures.push_back({{"omega1", p.omega1}, {"omega2", p.omega2}, {"diagnostic", p.optimum.diagnostic}});
    out["diagnostics"] = failures;
    return out;
}

std::string landscape_matrix(const LandscapeResult& r, const std::vector<double>& omega1,
                             const std::vector<double>& omega2) {
    std::ostringstream out;
    out << omega2.size();
    for (double w : omega2) out << " " << format_sci(w);
    out << "\n";
    for (std::size_t i = 0; i < omega1.size(); ++i) {
        out << format_sci(omega1[i]);
        for (std::size_t j = 0; j < omega2.size(); ++j) {
            const auto& p = r.points[i * omega2.size() + j];
            out << " " << format_sci(!p.excluded && p.stable ? p.n2 : std::nan(""));
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace optomech
