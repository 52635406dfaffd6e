#include "optomech/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "optomech/config.hpp"
#include "optomech/diagnostics.hpp"
#include "optomech/errors.hpp"
#include "optomech/experiments.hpp"
#include "optomech/linear_dynamics.hpp"
#include "optomech/pump_geometry.hpp"
#include "optomech/records.hpp"
#include "optomech/steady_state.hpp"
#include "optomech/validation.hpp"

namespace optomech {

namespace fs = std::filesystem;

namespace {

bool wants_csv(OutputFormat f) { return f != OutputFormat::json; }
bool wants_json(OutputFormat f) { return f != OutputFormat::csv; }

/// Overlays the sections of `file` on top of the preset defaults.
RunInput merge(RunInput base, const RunInput& file) {
    if (file.physical) {
        base.physical = file.physical;
        base.physical_detuning = file.physical_detuning;
        base.physical_geometry = file.physical_geometry;
        if (!file.model) base.model.reset();
    }
    if (file.model) base.model = file.model;
    if (file.sweep) base.sweep = file.sweep;
    if (file.geometry) base.geometry = file.geometry;
    if (file.validate) base.validate = file.validate;
    return base;
}

RunInput load_input(const RunConfig& c) {
    RunInput preset = preset_input(c.preset);
    if (c.input) return merge(std::move(preset), load_config(*c.input));
    if (c.preset == Preset::none && c.subcommand != "validate")
        throw ConfigError("--input is required unless a preset is given", 0, "input");
    return preset;
}

class Writer {
public:
    explicit Writer(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_))
            throw ConfigError("output directory '" + dir_.string() + "' cannot be created", 0, "output-dir");
    }

    void write(const std::string& name, const std::string& content) {
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw ConfigError("cannot write '" + path.string() + "'", 0, "output-dir");
        written_.push_back(path.string());
    }

    const std::vector<std::string>& written() const { return written_; }

private:
    fs::path dir_;
    std::vector<std::string> written_;
};

std::string csv_with_header(const std::string& header, const CsvTable& table) {
    return header + table.str();
}

Json meta_json(const std::string& title, const Echo& e) {
    Json params = Json::object();
    for (const auto& [k, v] : e) params[k] = v;
    return {{"tool", "optomech"}, {"version", kVersion}, {"record", title}, {"parameters", params}};
}

Echo physical_or_model(const RunInput& in, const ModelParams& m) {
    Echo e = echo(m);
    if (in.physical) {
        for (auto& kv : echo(*in.physical)) e.push_back({"physical." + kv.first, kv.second});
        if (in.physical_geometry) e.push_back({"physical.pump_geometry", to_string(*in.physical_geometry)});
    }
    return e;
}

Echo grid_echo(const PowerGrid& g) {
    return {{"sweep.power_min", format_double(g.min)},
            {"sweep.power_max", format_double(g.max)},
            {"sweep.power_points", std::to_string(g.points)},
            {"sweep.include_zero", g.include_zero ? "true" : "false"}};
}

Echo landscape_echo(const LandscapeSpec& s) {
    Echo e = echo(s.family.reference);
    for (auto& kv : e) kv.first = "reference." + kv.first;
    auto axis = [&](const Axis& a) {
        e.push_back({"sweep." + a.name + "_min", format_double(a.min)});
        e.push_back({"sweep." + a.name + "_max", format_double(a.max)});
        e.push_back({"sweep." + a.name + "_points", std::to_string(a.points)});
        e.push_back({"sweep." + a.name + "_scale", to_string(a.scale)});
    };
    axis(s.omega1);
    axis(s.omega2);
    e.push_back({"sweep.cavity_decay_rad_s", format_double(s.family.cavity_decay)});
    e.push_back({"sweep.bath_temp_mirror_K", format_double(s.family.bath_temp_mirror)});
    e.push_back({"sweep.bath_temp_sphere_K", format_double(s.family.bath_temp_sphere)});
    e.push_back({"sweep.detuning_min", format_double(s.bounds.detuning_min)});
    e.push_back({"sweep.detuning_max", format_double(s.bounds.detuning_max)});
    e.push_back({"sweep.detuning_points", std::to_string(s.bounds.detuning_points)});
    e.push_back({"sweep.fraction_min", format_double(s.bounds.power_min)});
    e.push_back({"sweep.fraction_max", format_double(s.bounds.power_max)});
    e.push_back({"sweep.fraction_points", std::to_string(s.bounds.power_points)});
    e.push_back({"sweep.step_floor", format_double(s.bounds.step_floor)});
    e.push_back({"sweep.objective", to_string(s.objective)});
    return e;
}

/// Fixed point used by `linear`: the only one, or the lowest branch when bistable.
ClassicalSteadyState single_state(const ModelParams& m) {
    if (m.detuning_mode == DetuningMode::effective) return classical_fixed_point(m);
    const auto states = solve_self_consistent(m);
    if (states.size() > 1)
        warn(std::to_string(states.size()) + " classical branches; using the lowest photon number");
    return states.front();
}

int cmd_derive(const RunConfig& c, const RunInput& in, Writer& w, std::ostream& out) {
    const ModelParams m = resolve_model(in);
    Echo e = physical_or_model(in, m);
    std::ostringstream text;
    text << header_block("derived model parameters", e);
    Json j;
    j["meta"] = meta_json("derive", e);
    j["model"] = to_json(m);
    if (in.physical) {
        const PhysicalParams& p = *in.physical;
        const double g1 = derive_g1(p), g2 = derive_g2(p), chi = derive_chi(p);
        text << "# g1_rad_s = " << format_double(g1) << "\n"
             << "# g2_rad_s = " << format_double(g2) << "\n"
             << "# chi_unscaled = " << format_double(chi) << "\n";
        j["couplings_si"] = {{"g1_rad_s", g1}, {"g2_rad_s", g2}, {"chi", chi}};
    }
    const std::string record = model_record(m);
    text << record;
    w.write("model.txt", text.str());
    if (wants_json(c.format)) w.write("model.json", j.dump(2) + "\n");
    out << record;
    return exit_ok;
}

int cmd_steady(const RunConfig& c, const RunInput& in, Writer& w, std::ostream& out) {
    const ModelParams m = resolve_model(in);
    const std::vector<ClassicalSteadyState> states = m.detuning_mode == DetuningMode::effective
                                                         ? std::vector{classical_fixed_point(m)}
                                                         : solve_self_consistent(m);
    const Echo e = physical_or_model(in, m);
    std::ostringstream text;
    text << header_block("classical steady states", e);
    Json j;
    j["meta"] = meta_json("steady", e);
    j["states"] = Json::array();
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto r = stationarity_residuals(m, states[i]);
        text << "\n" << steady_record(states[i], i) << "stationarity_residual = " << format_double(r.max()) << "\n";
        Json s = to_json(states[i]);
        s["stationarity_residual"] = r.max();
        j["states"].push_back(s);
    }
    w.write("steady.txt", text.str());
    if (wants_json(c.format)) w.write("steady.json", j.dump(2) + "\n");
    out << states.size() << " steady state(s)";
    for (const auto& s : states) out << "  |a|^2=" << format_double(s.photon_number);
    out << "\n";
    return exit_ok;
}

int cmd_linear(const RunConfig& c, const RunInput& in, Writer& w, std::ostream& out, std::ostream& err) {
    const ModelParams m = resolve_model(in);
    const ClassicalSteadyState s = single_state(m);
    ModelParams effective = m;
    effective.detuning_mode = DetuningMode::effective;
    effective.detuning = s.delta_eff;
    const LinearModel model = linearize(effective, s);
    const NormalModes modes = normal_modes(model.eigenvalues);
    const Echo e = physical_or_model(in, m);
    const std::string header = header_block("linearized dynamics", e);

    w.write("drift.txt", header + matrix_grid(model.drift));
    w.write("diffusion.txt", header + matrix_grid(model.diffusion));
    CsvTable eig;
    eig.header = {"re", "im"};
    for (int i = 0; i < 6; ++i)
        eig.rows.push_back({format_sci(model.eigenvalues(i).real()), format_sci(model.eigenvalues(i).imag())});
    w.write("eigenvalues.csv", csv_with_header(header, eig));

    Json j;
    j["meta"] = meta_json("linear", e);
    j["stable"] = model.stable;
    j["eigenvalues"] = Json::array();
    for (int i = 0; i < 6; ++i) j["eigenvalues"].push_back({model.eigenvalues(i).real(), model.eigenvalues(i).imag()});
    j["modes"] = Json::array();
    for (const auto& nm : modes.modes) j["modes"].push_back({{"frequency", nm.frequency}, {"damping", nm.damping}});
    j["modes_paired"] = modes.paired;

    if (!model.stable) {
        if (wants_json(c.format)) w.write("linear.json", j.dump(2) + "\n");
        double max_re = model.eigenvalues.real().maxCoeff();
        err << "error: drift matrix is unstable (max Re lambda = " << format_double(max_re)
            << "); no steady covariance exists\n";
        return exit_physics;
    }
    LyapunovDiagnostics diag;
    const SteadyCovariance cov = steady_covariance(model.drift, model.diffusion, &diag);
    w.write("covariance.txt", header + matrix_grid(cov.V));
    const double floor = physicality_floor(cov.V);
    std::ostringstream summary;
    summary << header << "stable = true\n"
            << "n1 = " << format_double(cov.n1) << "\n"
            << "n2 = " << format_double(cov.n2) << "\n"
            << "var_x1 = " << format_double(cov.var_x1) << "\n"
            << "var_p1 = " << format_double(cov.var_p1) << "\n"
            << "var_x2 = " << format_double(cov.var_x2) << "\n"
            << "var_p2 = " << format_double(cov.var_p2) << "\n"
            << "S1 = " << format_double(cov.S1) << "\n"
            << "S2 = " << format_double(cov.S2) << "\n"
            << "physicality_floor = " << format_double(floor) << "\n"
            << "lyapunov_residual = " << format_double(diag.residual) << "\n";
    for (int k = 0; k < 3; ++k)
        summary << "mode" << k << "_frequency = " << format_double(modes.modes[k].frequency) << "\n"
                << "mode" << k << "_damping = " << format_double(modes.modes[k].damping) << "\n";
    w.write("linear.txt", summary.str());
    j["n1"] = cov.n1;
    j["n2"] = cov.n2;
    j["variances"] = {{"x1", cov.var_x1}, {"p1", cov.var_p1}, {"x2", cov.var_x2}, {"p2", cov.var_p2}};
    j["S1"] = cov.S1;
    j["S2"] = cov.S2;
    j["physicality_floor"] = floor;
    j["lyapunov_residual"] = diag.residual;
    if (wants_json(c.format)) w.write("linear.json", j.dump(2) + "\n");
    out << "stable  n1=" << format_double(cov.n1) << "  n2=" << format_double(cov.n2)
        << "  S2=" << format_double(cov.S2) << "\n";
    return exit_ok;
}

int cmd_sweep(const RunConfig& c, const RunInput& in, Writer& w, std::ostream& out) {
    if (!in.sweep) throw ConfigError("the sweep command needs a [sweep] section or a preset", 0, "sweep");
    const SweepConfig& s = *in.sweep;
    if (s.kind == SweepKind::landscape) {
        LandscapeSpec spec = s.landscape;
        spec.threads = c.threads;
        if (in.physical_geometry) spec.family.reference = apply_geometry(spec.family.reference, *in.physical_geometry);
        const LandscapeResult r = occupation_landscape(spec);
        const Echo e = landscape_echo(spec);
        const std::string header = header_block("occupation landscape", e);
        if (wants_csv(c.format)) w.write("landscape.csv", csv_with_header(header, landscape_table(r)));
        if (wants_json(c.format)) {
            Json j = to_json(r);
            j["meta"] = meta_json("landscape", e);
            w.write("landscape.json", j.dump(2) + "\n");
        }
        w.write("landscape_n2.dat", header + landscape_matrix(r, spec.omega1.values(), spec.omega2.values()));
        const Json summary = to_json(r);
        out << "landscape: " << r.points.size() << " points, optimum " << summary["optimum"].dump() << "\n";
        return exit_ok;
    }

    const ModelParams m = resolve_model(in);
    Echo e = physical_or_model(in, m);
    for (auto& kv : grid_echo(s.power)) e.push_back(kv);
    e.push_back({"sweep.kind", to_string(s.kind)});
    const std::string header = header_block(to_string(s.kind) + " sweep", e);
    if (s.kind == SweepKind::power) {
        const PowerSweepResult r = power_sweep(m, s.power);
        if (wants_csv(c.format)) w.write("power_sweep.csv", csv_with_header(header, power_sweep_table(r)));
        Json j = to_json(r);
        j["meta"] = meta_json("power sweep", e);
        if (wants_json(c.format)) w.write("power_sweep.json", j.dump(2) + "\n");
        out << "power sweep: " << r.rows.size() << " rows, threshold " << j["threshold"].dump()
            << ", hybridization " << j["hybridization"].dump() << "\n";
    } else {
        const SqueezingSweepResult r = squeezing_sweep(m, s.power);
        if (wants_csv(c.format)) w.write("squeezing_sweep.csv", csv_with_header(header, squeezing_sweep_table(r)));
        Json j = to_json(r);
        j["meta"] = meta_json("squeezing sweep", e);
        if (wants_json(c.format)) w.write("squeezing_sweep.json", j.dump(2) + "\n");
        out << "squeezing sweep: " << r.rows.size() << " rows, maximum " << j["maximum"].dump() << "\n";
    }
    return exit_ok;
}

int cmd_geometry(const RunConfig& c, const RunInput& in, Writer& w, std::ostream& out) {
    if (!in.geometry) throw ConfigError("the geometry command needs a [geometry] section", 0, "geometry");
    const GeometryConfig& g = *in.geometry;
    const auto samples = sample_field(g.cavity, g.samples);
    const auto form = interaction_form(g.variant);
    const auto L = lineshape(g.cavity);
    Echo e = {{"geometry.variant", to_string(g.variant)},
              {"geometry.cavity_length_m", format_double(g.cavity.length)},
              {"geometry.wavenumber_per_m", format_double(g.cavity.wavenumber)},
              {"geometry.reflectivity", format_double(g.cavity.reflectivity)},
              {"geometry.transmissivity", format_double(g.cavity.transmissivity)},
              {"geometry.samples", std::to_string(g.samples)}};
    const std::string header = header_block("intracavity field profile", e);
    if (wants_csv(c.format)) w.write("field.csv", csv_with_header(header, field_table(samples)));
    Json j;
    j["meta"] = meta_json("geometry", e);
    j["interaction_form"] = {{"alpha", form.alpha}, {"beta", form.beta}};
    j["lineshape"] = {{"re", L.real()}, {"im", L.imag()}, {"abs2", std::norm(L)}};
    j["finesse"] = finesse(g.cavity);
    if (in.model || in.physical) {
        const ModelParams m = resolve_model(in);
        j["chi"] = {{"input", m.chi}, {"effective", chi_for_geometry(g.variant, m.chi)}};
    }
    if (wants_json(c.format)) w.write("geometry.json", j.dump(2) + "\n");
    out << "geometry " << to_string(g.variant) << ": " << samples.size() << " samples, |L|^2="
        << format_double(std::norm(L)) << ", finesse=" << format_double(finesse(g.cavity)) << "\n";
    return exit_ok;
}

int cmd_validate(const RunConfig& c, const RunInput& in, Writer& w, std::ostream& out, std::ostream& err) {
    const ValidateConfig v = in.validate.value_or(ValidateConfig{});
    const ValidationReport r = run_validation(v.instances, v.seed, c.threads);
    const Echo e = {{"validate.instances", std::to_string(v.instances)},
                    {"validate.seed", std::to_string(v.seed)},
                    {"validate.algebraic_tolerance", format_double(kAlgebraicTolerance)},
                    {"validate.moment_flow_tolerance", format_double(kMomentFlowTolerance)}};
    std::ostringstream text;
    text << header_block("solver agreement report", e)
         << "cases = " << r.cases.size() << "\n"
         << "max_algebraic_discrepancy = " << format_double(r.max_algebraic) << "\n"
         << "worst_algebraic_case = " << r.worst_algebraic << "\n"
         << "max_moment_flow_discrepancy = " << format_double(r.max_moment_flow) << "\n"
         << "worst_moment_flow_case = " << r.worst_moment_flow << "\n"
         << "all_flows_settled = " << (r.all_flows_settled ? "true" : "false") << "\n"
         << "max_relative_residual = " << format_double(r.max_residual) << "\n"
         << "min_physicality_floor = " << format_double(r.min_physicality_floor) << "\n"
         << "min_raw_occupation = " << format_double(r.min_raw_occupation) << "\n"
         << "passed = " << (r.passed() ? "true" : "false") << "\n";
    w.write("validate.txt", text.str());
    if (wants_json(c.format)) {
        Json j;
        j["meta"] = meta_json("validate", e);
        j["cases"] = r.cases.size();
        j["max_algebraic_discrepancy"] = r.max_algebraic;
        j["worst_algebraic_case"] = r.worst_algebraic;
        j["max_moment_flow_discrepancy"] = r.max_moment_flow;
        j["worst_moment_flow_case"] = r.worst_moment_flow;
        j["all_flows_settled"] = r.all_flows_settled;
        j["max_relative_residual"] = r.max_residual;
        j["min_physicality_floor"] = r.min_physicality_floor;
        j["min_raw_occupation"] = r.min_raw_occupation;
        j["passed"] = r.passed();
        w.write("validate.json", j.dump(2) + "\n");
    }
    out << "validate: " << r.cases.size() << " cases, max algebraic " << format_double(r.max_algebraic)
        << " (tol " << format_double(kAlgebraicTolerance) << "), max moment-flow "
        << format_double(r.max_moment_flow) << " (tol " << format_double(kMomentFlowTolerance) << ")\n";
    if (!r.passed()) {
        err << "error: solver discrepancy above tolerance (worst cases: " << r.worst_algebraic << "; "
            << r.worst_moment_flow << ")\n";
        return exit_numerical;
    }
    return exit_ok;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (config.threads < 1) throw ConfigError("thread count must be at least 1", 0, "threads");
        const RunInput in = load_input(config);
        Writer writer(config.output_dir);
        const std::string& cmd = config.subcommand;
        if (cmd == "derive") return cmd_derive(config, in, writer, out);
        if (cmd == "steady") return cmd_steady(config, in, writer, out);
        if (cmd == "linear") return cmd_linear(config, in, writer, out, err);
        if (cmd == "sweep") return cmd_sweep(config, in, writer, out);
        if (cmd == "geometry") return cmd_geometry(config, in, writer, out);
        if (cmd == "validate") return cmd_validate(config, in, writer, out, err);
        throw ConfigError("unknown subcommand '" + cmd + "'", 0, "subcommand");
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const InvalidParameter& e) {
        err << "invalid parameter: " << e.what() << "\n";
        return exit_config;
    } catch (const PhysicsError& e) {
        err << "physics error: " << e.what() << "\n";
        return exit_physics;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_numerical;
    }
}

int cli_main(int argc, char** argv) {
    CLI::App app{"Three-mode optomechanics simulator: cavity, moving mirror and levitated sphere"};
    app.set_version_flag("--version", std::string("optomech ") + kVersion);
    app.fallthrough();
    app.require_subcommand(1);

    RunConfig config;
    if (const char* env = std::getenv("OPTOMECH_THREADS")) {
        try {
            std::size_t used = 0;
            config.threads = std::stoi(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument(env);
        } catch (const std::exception&) {
            std::cerr << "config error: OPTOMECH_THREADS must be an integer\n";
            return exit_config;
        }
    }

    std::string input, format = "both", preset = "none";
    app.add_option("-i,--input", input, "Configuration file");
    app.add_option("-o,--output-dir", config.output_dir, "Directory for output files")->capture_default_str();
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json", "both"}))->capture_default_str();
    app.add_option("--preset", preset, "Parameter preset")->check(CLI::IsMember({"none", "fig2", "fig3", "fig4"}))->capture_default_str();
    app.add_option("--threads", config.threads, "Worker threads (default: OPTOMECH_THREADS or 1)");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"derive", "Convert physical parameters to model units"},
        {"steady", "Classical fixed point(s)"},
        {"linear", "Drift and diffusion matrices, eigenvalues, steady covariance"},
        {"sweep", "Power, squeezing or landscape sweep"},
        {"geometry", "Intracavity field profile for a pumping geometry"},
        {"validate", "Cross-check the covariance solvers against the oracles"},
    };
    for (const auto& [name, help] : commands)
        app.add_subcommand(name, help)->callback([&config, name = name] { config.subcommand = name; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }
    if (!input.empty()) config.input = input;
    config.format = format == "csv" ? OutputFormat::csv : format == "json" ? OutputFormat::json : OutputFormat::both;
    config.preset = preset_from_string(preset);
    return run(config, std::cout, std::cerr);
}

}  // namespace optomech
