#include "optomech/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

namespace {

struct Entry {
    std::string value;
    int line = 0;
};

struct Section {
    std::string name;
    int line = 0;
    std::map<std::string, Entry> entries;
};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool valid_identifier(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

/// Number followed by an optional unit; empty unit when there is none.
std::pair<double, std::string> split_number(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) throw InvalidParameter("empty value");
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    if (end == begin) throw InvalidParameter("'" + s + "' is not a number");
    if (errno == ERANGE) throw InvalidParameter("'" + s + "' is out of range");
    if (!std::isfinite(value)) throw InvalidParameter("'" + s + "' is not finite");
    return {value, trim(std::string(end))};
}

const std::map<std::string, std::map<std::string, double>>& unit_tables() {
    static const std::map<std::string, std::map<std::string, double>> tables = {
        {"length", {{"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}, {"μm", 1e-6},
                    {"µm", 1e-6}, {"nm", 1e-9}}},
        {"mass", {{"kg", 1.0}, {"g", 1e-3}, {"mg", 1e-6}, {"ug", 1e-9}, {"μg", 1e-9},
                  {"µg", 1e-9}, {"ng", 1e-12}, {"pg", 1e-15}}},
        // Ordinary frequencies; converted to angular below. rad/s passes through.
        {"frequency", {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}, {"mHz", 1e-3},
                       {"uHz", 1e-6}, {"μHz", 1e-6}, {"µHz", 1e-6}}},
        {"temperature", {{"K", 1.0}, {"mK", 1e-3}, {"uK", 1e-6}, {"μK", 1e-6},
                         {"µK", 1e-6}, {"nK", 1e-9}}},
        {"power", {{"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}, {"μW", 1e-6},
                   {"µW", 1e-6}, {"nW", 1e-9}, {"pW", 1e-12}}},
        {"density", {{"kg/m^3", 1.0}, {"kg/m3", 1.0}, {"g/cm^3", 1e3}, {"g/cm3", 1e3}}},
    };
    return tables;
}

double parse_number(const std::string& text) {
    const auto [value, unit] = split_number(text);
    if (!unit.empty()) throw InvalidParameter("unexpected unit '" + unit + "' on a dimensionless value");
    return value;
}

bool parse_bool(const std::string& text) {
    const std::string s = trim(text);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw InvalidParameter("'" + s + "' is not a boolean (true/false)");
}

int parse_count(const std::string& text) {
    const double v = parse_number(text);
    if (v != std::floor(v) || v < 0.0 || v > 1e9) throw InvalidParameter("'" + trim(text) + "' is not a count");
    return static_cast<int>(v);
}

/// Hands out the entries of one section and complains about leftovers.
class Reader {
public:
    explicit Reader(const Section& section) : section_(section) {}

    bool has(const std::string& key) const { return section_.entries.count(key) > 0; }

    const Entry* find(const std::string& key) {
        auto it = section_.entries.find(key);
        if (it == section_.entries.end()) return nullptr;
        used_.insert(key);
        return &it->second;
    }

    const Entry& require(const std::string& key) {
        const Entry* e = find(key);
        if (!e)
            throw ConfigError("missing mandatory key in [" + section_.name + "]", section_.line, key);
        return *e;
    }

    /// Runs `convert` on the entry, rewrapping parameter errors with the line.
    template <class F>
    auto convert(const std::string& key, const Entry& e, F&& fn) -> decltype(fn(e.value)) {
        try {
            return fn(e.value);
        } catch (const InvalidParameter& ex) {
            throw ConfigError(ex.what(), e.line, key);
        }
    }

    template <class F>
    auto get(const std::string& key, F&& fn) -> decltype(fn(std::string{})) {
        return convert(key, require(key), std::forward<F>(fn));
    }

    template <class T, class F>
    T get_or(const std::string& key, T fallback, F&& fn) {
        const Entry* e = find(key);
        return e ? convert(key, *e, std::forward<F>(fn)) : fallback;
    }

    void finish() const {
        for (const auto& [key, entry] : section_.entries)
            if (!used_.count(key)) throw ConfigError("unknown key in [" + section_.name + "]", entry.line, key);
    }

    int line() const { return section_.line; }

private:
    const Section& section_;
    std::set<std::string> used_;
};

auto quantity(const std::string& dimension) {
    return [dimension](const std::string& v) { return parse_quantity(v, dimension); };
}

auto positive_quantity(const std::string& dimension) {
    return [dimension](const std::string& v) {
        const double q = parse_quantity(v, dimension);
        if (!(q > 0.0)) throw InvalidParameter("must be strictly positive");
        return q;
    };
}

auto non_negative_quantity(const std::string& dimension) {
    return [dimension](const std::string& v) {
        const double q = parse_quantity(v, dimension);
        if (!(q >= 0.0)) throw InvalidParameter("must be non-negative");
        return q;
    };
}

const auto number = [](const std::string& v) { return parse_number(v); };
const auto count = [](const std::string& v) { return parse_count(v); };
const auto boolean = [](const std::string& v) { return parse_bool(v); };

/// Turns an InvalidParameter naming a field ("omega1 must be ...") into a
/// ConfigError pointing at that key.
template <class F>
void check_invariants(const Section& section, F&& fn) {
    try {
        fn();
    } catch (const InvalidParameter& ex) {
        const std::string message = ex.what();
        const std::string field = message.substr(0, message.find(' '));
        auto it = section.entries.find(field);
        throw ConfigError(message, it != section.entries.end() ? it->second.line : section.line, field);
    }
}

DetuningMode parse_detuning_mode(const std::string& text) {
    const std::string s = trim(text);
    if (s == "effective") return DetuningMode::effective;
    if (s == "bare") return DetuningMode::bare;
    throw InvalidParameter("detuning_mode must be 'effective' or 'bare'");
}

SphereSite parse_site(const std::string& text) {
    const std::string s = trim(text);
    if (s == "node") return SphereSite::node;
    if (s == "antinode") return SphereSite::antinode;
    throw InvalidParameter("sphere_site must be 'node' or 'antinode'");
}

PumpGeometry parse_geometry(const std::string& text) {
    try {
        return pump_geometry_from_string(trim(text));
    } catch (const std::exception& e) {
        throw InvalidParameter(e.what());
    }
}

void read_physical(const Section& section, RunInput& out) {
    Reader r(section);
    PhysicalParams p;
    p.wavelength = r.get("wavelength", positive_quantity("length"));
    p.cavity_length = r.get("cavity_length", positive_quantity("length"));
    p.cavity_decay = r.get("cavity_decay", positive_quantity("frequency"));
    p.mirror_mass = r.get("mirror_mass", positive_quantity("mass"));
    p.mirror_freq = r.get("mirror_freq", positive_quantity("frequency"));
    p.mirror_damping = r.get("mirror_damping", positive_quantity("frequency"));
    p.sphere_radius = r.get("sphere_radius", positive_quantity("length"));
    p.sphere_density = r.get("sphere_density", positive_quantity("density"));
    p.refractive_index = r.get("refractive_index", [](const std::string& v) {
        const double n = parse_number(v);
        if (!(n > 1.0)) throw InvalidParameter("refractive index must exceed 1");
        return n;
    });
    p.sphere_freq = r.get("sphere_freq", positive_quantity("frequency"));
    p.sphere_damping = r.get("sphere_damping", positive_quantity("frequency"));
    p.cavity_waist = r.get("cavity_waist", positive_quantity("length"));

    // One shared bath temperature, or one per oscillator.
    const Entry* shared = r.find("temperature");
    if (shared) {
        for (const char* key : {"bath_temp_mirror", "bath_temp_sphere"})
            if (r.has(key))
                throw ConfigError("conflicts with 'temperature'", section.entries.at(key).line, key);
        p.bath_temp_mirror = p.bath_temp_sphere = r.convert("temperature", *shared, non_negative_quantity("temperature"));
    } else {
        p.bath_temp_mirror = r.get("bath_temp_mirror", non_negative_quantity("temperature"));
        p.bath_temp_sphere = r.get("bath_temp_sphere", non_negative_quantity("temperature"));
    }
    p.input_power = r.get("input_power", non_negative_quantity("power"));
    p.sphere_site = r.get_or("sphere_site", SphereSite::node, parse_site);

    out.physical_detuning.mode = r.get_or("detuning_mode", DetuningMode::effective, parse_detuning_mode);
    out.physical_detuning.value = r.get_or("detuning", 0.0, quantity("frequency"));
    if (const Entry* e = r.find("pump_geometry")) out.physical_geometry = r.convert("pump_geometry", *e, parse_geometry);
    r.finish();
    check_invariants(section, [&] { validate(p); });
    out.physical = p;
}

void read_model(const Section& section, RunInput& out) {
    Reader r(section);
    ModelParams m;
    m.omega1 = r.get("omega1", number);
    m.omega2 = r.get("omega2", number);
    m.gamma1 = r.get("gamma1", number);
    m.gamma2 = r.get("gamma2", number);
    m.g1 = r.get("g1", number);
    m.g2 = r.get("g2", number);
    m.chi = r.get("chi", number);
    m.detuning = r.get("detuning", number);
    m.detuning_mode = r.get_or("detuning_mode", DetuningMode::effective, parse_detuning_mode);
    m.drive = r.get_or("drive", 0.0, number);
    m.n1 = r.get_or("n1", 0.0, number);
    m.n2 = r.get_or("n2", 0.0, number);
    r.finish();
    check_invariants(section, [&] { validate(m); });
    out.model = m;
}

SweepKind parse_sweep_kind(const std::string& text) {
    const std::string s = trim(text);
    if (s == "power") return SweepKind::power;
    if (s == "squeezing") return SweepKind::squeezing;
    if (s == "landscape") return SweepKind::landscape;
    throw InvalidParameter("kind must be 'power', 'squeezing' or 'landscape'");
}

ObjectiveKind parse_objective(const std::string& text) {
    const std::string s = trim(text);
    if (s == "occupation") return ObjectiveKind::sphere_occupation;
    if (s == "squeezing") return ObjectiveKind::sphere_squeezing;
    throw InvalidParameter("objective must be 'occupation' or 'squeezing'");
}

/// Sweep powers: bare numbers are drives |a_in|^2, watts need [physical].
struct PendingPower {
    double value = 0.0;
    bool watts = false;
    int line = 0;
    std::string key;
};

PendingPower read_power(Reader& r, const std::string& key) {
    const Entry& e = r.require(key);
    return r.convert(key, e, [&](const std::string& v) {
        const auto [value, unit] = split_number(v);
        if (unit.empty()) return PendingPower{value, false, e.line, key};
        return PendingPower{parse_quantity(v, "power"), true, e.line, key};
    });
}

void read_sweep(const Section& section, RunInput& out, std::vector<PendingPower>& pending) {
    Reader r(section);
    SweepConfig s;
    s.kind = r.get("kind", parse_sweep_kind);
    if (s.kind == SweepKind::landscape) {
        auto& l = s.landscape;
        auto axis = [&](Axis& a, const std::string& prefix) {
            a.min = r.get_or(prefix + "_min", a.min, number);
            a.max = r.get_or(prefix + "_max", a.max, number);
            a.points = r.get_or(prefix + "_points", a.points, count);
        };
        axis(l.omega1, "omega1");
        axis(l.omega2, "omega2");
        l.bounds.detuning_min = r.get_or("detuning_min", l.bounds.detuning_min, number);
        l.bounds.detuning_max = r.get_or("detuning_max", l.bounds.detuning_max, number);
        l.bounds.detuning_points = r.get_or("detuning_points", l.bounds.detuning_points, count);
        l.bounds.power_min = r.get_or("fraction_min", l.bounds.power_min, number);
        l.bounds.power_max = r.get_or("fraction_max", l.bounds.power_max, number);
        l.bounds.power_points = r.get_or("fraction_points", l.bounds.power_points, count);
        l.bounds.step_floor = r.get_or("step_floor", l.bounds.step_floor, number);
        l.objective = r.get_or("objective", l.objective, parse_objective);
        r.finish();
        try {
            l.omega1.validate();
            l.omega2.validate();
            l.bounds.validate();
            if (l.bounds.power_max > 1.0) throw InvalidParameter("fraction_max must not exceed 1");
        } catch (const InvalidParameter& e) {
            throw ConfigError(e.what(), section.line, "sweep");
        }
    } else {
        const PendingPower lo = read_power(r, "power_min");
        const PendingPower hi = read_power(r, "power_max");
        pending = {lo, hi};
        s.power.points = r.get_or("power_points", s.power.points, count);
        s.power.include_zero = r.get_or("include_zero", s.power.include_zero, boolean);
        r.finish();
    }
    out.sweep = s;
}

void read_geometry(const Section& section, RunInput& out) {
    Reader r(section);
    GeometryConfig g;
    g.variant = r.get_or("variant", g.variant, parse_geometry);
    const double wavelength = r.get("wavelength", positive_quantity("length"));
    g.cavity.length = r.get("cavity_length", positive_quantity("length"));
    g.cavity.wavenumber = constants::two_pi / wavelength;
    g.cavity.reflectivity = r.get("reflectivity", number);
    g.cavity.transmissivity = r.get_or("transmissivity", std::sqrt(std::max(0.0, 1.0 - g.cavity.reflectivity * g.cavity.reflectivity)), number);
    g.samples = r.get_or("samples", g.samples, count);
    r.finish();
    try {
        validate(g.cavity);
        if (g.samples < 2) throw InvalidParameter("samples must be at least 2");
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what(), section.line, "geometry");
    }
    out.geometry = g;
}

void read_validate(const Section& section, RunInput& out) {
    Reader r(section);
    ValidateConfig v;
    v.instances = r.get_or("instances", v.instances, count);
    v.seed = static_cast<std::uint64_t>(r.get_or("seed", static_cast<int>(v.seed), count));
    r.finish();
    out.validate = v;
}

}  // namespace

double parse_quantity(const std::string& text, const std::string& dimension) {
    const auto [value, unit] = split_number(text);
    if (unit.empty()) throw InvalidParameter("missing unit (expected a " + dimension + ")");
    if (dimension == "frequency" && unit == "rad/s") return value;
    const auto& tables = unit_tables();
    auto table = tables.find(dimension);
    if (table == tables.end()) throw InvalidParameter("unknown dimension '" + dimension + "'");
    auto it = table->second.find(unit);
    if (it == table->second.end()) throw InvalidParameter("unit '" + unit + "' is not a " + dimension + " unit");
    const double si = value * it->second;
    return dimension == "frequency" ? constants::two_pi * si : si;
}

RunInput parse_config(const std::string& text) {
    std::vector<Section> sections;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header", line_no);
            const std::string name = trim(line.substr(1, line.size() - 2));
            static const std::set<std::string> known = {"physical", "model", "sweep", "geometry", "validate"};
            if (!known.count(name)) throw ConfigError("unknown section [" + name + "]", line_no, name);
            if (!seen.insert(name).second) throw ConfigError("duplicate section [" + name + "]", line_no, name);
            sections.push_back({name, line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_identifier(key)) throw ConfigError("malformed key", line_no, key);
        if (sections.empty()) throw ConfigError("key outside of any section", line_no, key);
        if (value.empty()) throw ConfigError("empty value", line_no, key);
        if (!sections.back().entries.emplace(key, Entry{value, line_no}).second)
            throw ConfigError("duplicate key", line_no, key);
    }

    RunInput out;
    std::vector<PendingPower> pending;
    for (const auto& s : sections) {
        if (s.name == "physical") read_physical(s, out);
        else if (s.name == "model") read_model(s, out);
        else if (s.name == "sweep") read_sweep(s, out, pending);
        else if (s.name == "geometry") read_geometry(s, out);
        else if (s.name == "validate") read_validate(s, out);
    }

    if (out.sweep && out.sweep->kind != SweepKind::landscape) {
        auto drive = [&](const PendingPower& p) {
            if (!p.watts) return p.value;
            if (!out.physical) throw ConfigError("powers in watts need a [physical] section", p.line, p.key);
            PhysicalParams q = *out.physical;
            q.input_power = p.value;
            return nondimensionalize(q).drive;
        };
        out.sweep->power.min = drive(pending.at(0));
        out.sweep->power.max = drive(pending.at(1));
        try {
            out.sweep->power.validate();
        } catch (const InvalidParameter& e) {
            throw ConfigError(e.what(), pending.at(0).line, "power_min");
        }
    }
    if (out.sweep && out.sweep->kind == SweepKind::landscape) {
        if (!out.physical)
            throw ConfigError("a landscape sweep needs a [physical] section for its bath temperatures", 0, "sweep");
        out.sweep->landscape.family = FrequencyFamily::from_physical(*out.physical, out.physical_detuning);
    }
    return out;
}

RunInput load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open configuration file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

ModelParams resolve_model(const RunInput& input) {
    if (input.model) return *input.model;
    if (!input.physical) throw ConfigError("configuration needs a [model] or [physical] section");
    ModelParams m = nondimensionalize(*input.physical, input.physical_detuning);
    if (input.physical_geometry) m = apply_geometry(m, *input.physical_geometry);
    return m;
}

std::string to_string(SweepKind kind) {
    switch (kind) {
        case SweepKind::power: return "power";
        case SweepKind::squeezing: return "squeezing";
        case SweepKind::landscape: return "landscape";
    }
    return "power";
}

}  // namespace optomech
