// Batch front end: config merge, subcommand dispatch, CSV emission.
// Exit codes: 0 ok, 1 runtime failure, 2 invalid configuration, 3 no Stark solution.

#include "tsd/tsd.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace tsd;
namespace fs = std::filesystem;

enum ExitCode : int { ok = 0, runtime_failure = 1, invalid_config = 2, no_solution = 3 };

struct Invocation {
    std::string config_file;
    std::string preset;
    std::vector<std::string> sets;
    std::string out_dir;
};

struct Context {
    RunConfig cfg;
    std::optional<Preset> preset;
    fs::path out;

    // "# preset <name>: <label>" when a preset was used, otherwise the meta label if any.
    std::ofstream open_csv(const std::string& name) const {
        fs::create_directories(out);
        std::ofstream f(out / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (out / name).string());
        csv::Writer w(f);
        if (preset) w.comment("preset " + std::string(preset->name) + ": " + std::string(preset->label));
        else if (!cfg.label.empty()) w.comment(cfg.label);
        return f;
    }

    void announce(const std::string& name) const { std::cout << "wrote " << (out / name).string() << '\n'; }
};

Context load(const Invocation& inv) {
    ConfigMap map;
    Context ctx;
    if (!inv.preset.empty()) {
        ctx.preset = find_preset(inv.preset);
        parse_config_text(ctx.preset->text, "preset:" + inv.preset, map);
    }
    if (!inv.config_file.empty()) parse_config_file(inv.config_file, map);
    for (const auto& s : inv.sets) apply_override(s, map);
    ctx.cfg = build_run_config(map);
    if (ctx.preset) {
        ctx.cfg.preset = std::string(ctx.preset->name);
        if (ctx.cfg.label.empty()) ctx.cfg.label = std::string(ctx.preset->label);
    }
    ctx.out = inv.out_dir.empty() ? fs::path(ctx.cfg.output_dir) : fs::path(inv.out_dir);
    return ctx;
}

void require_nonempty(const std::vector<double>& axis, const char* key) {
    if (axis.empty()) throw ConfigError(key, std::string("axis list '") + key + "' is empty");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Input coordinates after a unit round trip; 15 digits drop the conversion noise.
std::string coord(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

std::string v_mhz(double v) { return std::isinf(v) ? std::string("inf") : coord(rad_per_s_to_mhz(v)); }

int cmd_cnot(const Context& ctx) {
    const RunConfig& rc = ctx.cfg;
    SequenceOptions so = rc.sequence;
    if (!rc.traces) so.samples_per_pulse = 0;
    const GateResult g = run_tsd_cnot(rc.gate, rc.velocity.v_c, rc.velocity.v_t, so);
    const double tt = truth_table_error(g.u_realized), rot = rotation_error(g.u_realized);
    const double tg = gate_duration(rc.gate.omega_t);

    {
        auto f = ctx.open_csv("gate.csv");
        std::vector<std::string> cols{"row"};
        for (const char* c : {"00", "01", "10", "11"}) {
            cols.push_back(std::string("re_") + c);
            cols.push_back(std::string("im_") + c);
        }
        csv::Writer w(f);
        w.header(cols);
        for (Eigen::Index r = 0; r < 4; ++r) {
            std::vector<std::string> cells{basis::labels(basis::Kind::computational)[static_cast<std::size_t>(r)].data()};
            for (Eigen::Index c = 0; c < 4; ++c) {
                cells.push_back(csv::number(g.u_realized(r, c).real()));
                cells.push_back(csv::number(g.u_realized(r, c).imag()));
            }
            w.row(cells);
        }
        ctx.announce("gate.csv");
    }
    {
        auto f = ctx.open_csv("summary.csv");
        csv::Writer w(f);
        w.header({"omega_c_MHz", "omega_t_MHz", "v_interaction_MHz", "case", "v_c_m_per_s", "v_t_m_per_s",
                  "truth_table_error", "rotation_error", "gate_duration_s"});
        w.row({coord(rad_per_s_to_mhz(rc.gate.omega_c)), csv::number(rad_per_s_to_mhz(rc.gate.omega_t)),
               v_mhz(rc.gate.v_interaction), std::to_string(rc.sequence.case_id), csv::number(rc.velocity.v_c),
               csv::number(rc.velocity.v_t), csv::number(tt), csv::number(rot), csv::number(tg)});
        ctx.announce("summary.csv");
    }
    std::cout << std::setprecision(6) << "truth_table_error " << tt << "\nrotation_error    " << rot
              << "\ngate_duration_s   " << tg << '\n';

    if (rc.traces) {
        for (std::size_t i = 0; i < 4; ++i) {
            const std::string name = "trace_" + std::string(basis::labels(basis::Kind::computational)[i]) + ".csv";
            auto f = ctx.open_csv(name);
            write_record_csv(f, g.records[i]);
            ctx.announce(name);
        }
    }

    if (!rc.temperatures.empty()) {
        const ErrorSurface s = doppler_error_surface(rc.gate, rc.sequence, rc.ensemble);
        auto f = ctx.open_csv("doppler.csv");
        csv::Writer w(f);
        w.header({"temperature_uK", "rotation_error", "grid_points", "v_max_m_per_s"});
        std::cout << "temperature_uK  rotation_error\n";
        for (double t : rc.temperatures) {
            const double e = s.average_rotation(t);
            w.row({coord(t * 1e6), csv::number(e), std::to_string(rc.ensemble.grid_points), coord(rc.ensemble.v_max)});
            std::cout << std::setw(14) << t * 1e6 << "  " << e << '\n';
        }
        ctx.announce("doppler.csv");
    }
    return ok;
}

int cmd_bell(const Context& ctx) {
    const RunConfig& rc = ctx.cfg;
    const BellOutcome b = prepare_bell(rc.gate, rc.velocity.v_c, rc.velocity.v_t, rc.sequence);
    const double corrected = bell_error_phase_corrected(b.computational), sensitive = bell_error(b.computational);
    {
        auto f = ctx.open_csv("bell.csv");
        csv::Writer w(f);
        w.header({"v_c_m_per_s", "v_t_m_per_s", "bell_error", "bell_error_phase_sensitive", "P00", "P01", "P10", "P11"});
        w.row({rc.velocity.v_c, rc.velocity.v_t, corrected, sensitive, std::norm(b.computational(0)),
               std::norm(b.computational(1)), std::norm(b.computational(2)), std::norm(b.computational(3))});
        ctx.announce("bell.csv");
    }
    std::cout << std::setprecision(6) << "bell_error                 " << corrected << "\nbell_error_phase_sensitive "
              << sensitive << '\n';

    if (!rc.temperatures.empty()) {
        const ErrorSurface s = doppler_error_surface(rc.gate, rc.sequence, rc.ensemble);
        auto f = ctx.open_csv("bell_doppler.csv");
        csv::Writer w(f);
        w.header({"temperature_uK", "bell_error", "bell_error_phase_sensitive", "grid_points", "v_max_m_per_s"});
        std::cout << "temperature_uK  bell_error\n";
        for (double t : rc.temperatures) {
            const double e = s.average_bell(t);
            w.row({coord(t * 1e6), csv::number(e), csv::number(s.average(s.bell_phase_sensitive, s.grid(t))),
                   std::to_string(rc.ensemble.grid_points), coord(rc.ensemble.v_max)});
            std::cout << std::setw(14) << t * 1e6 << "  " << e << '\n';
        }
        ctx.announce("bell_doppler.csv");
    }
    return ok;
}

int cmd_sweep(const Context& ctx, const std::string& axis) {
    const RunConfig& rc = ctx.cfg;
    const std::string name = "sweep_" + axis + ".csv";
    std::cout << std::setprecision(6);

    if (axis == "temperature") {
        require_nonempty(rc.temperatures, "ensemble.temperatures_uk");
        auto f = ctx.open_csv(name);
        csv::Writer w(f);
        w.header({"temperature_uK", "rotation_error", "bell_error", "wall_time_s"});
        auto t0 = std::chrono::steady_clock::now();
        const ErrorSurface s = doppler_error_surface(rc.gate, rc.sequence, rc.ensemble);
        for (double t : rc.temperatures) {
            const double e = s.average_rotation(t), b = s.average_bell(t);
            w.row({coord(t * 1e6), csv::number(e), csv::number(b), csv::number(seconds_since(t0))});
            std::cout << t * 1e6 << " uK: rotation " << e << ", bell " << b << '\n';
            t0 = std::chrono::steady_clock::now();
        }
    } else if (axis == "interaction") {
        require_nonempty(rc.interactions, "ensemble.interactions_mhz");
        require_nonempty(rc.temperatures, "ensemble.temperatures_uk");
        auto f = ctx.open_csv(name);
        csv::Writer w(f);
        w.header({"v_interaction_MHz", "temperature_uK", "rotation_error", "wall_time_s"});
        for (double v : rc.interactions) {
            auto t0 = std::chrono::steady_clock::now();
            const auto rows = interaction_sweep(rc.gate, {v}, rc.temperatures, rc.sequence, rc.ensemble);
            for (const InteractionRow& r : rows) {
                w.row({v_mhz(r.v_interaction), coord(r.temperature * 1e6), csv::number(r.rotation_error),
                       csv::number(seconds_since(t0))});
                std::cout << rad_per_s_to_mhz(r.v_interaction) << " MHz, " << r.temperature * 1e6
                          << " uK: rotation " << r.rotation_error << '\n';
                t0 = std::chrono::steady_clock::now();
            }
        }
    } else if (axis == "sigma") {
        require_nonempty(rc.sigmas, "ensemble.sigmas_percent");
        auto f = ctx.open_csv(name);
        csv::Writer w(f);
        w.header({"sigma_percent", "rotation_error", "wall_time_s"});
        for (double s : rc.sigmas) {
            const auto t0 = std::chrono::steady_clock::now();
            const double e = amplitude_fluctuation_error(rc.gate, s, rc.sequence);
            w.row({coord(s * 100.0), csv::number(e), csv::number(seconds_since(t0))});
            std::cout << s * 100.0 << " %: rotation " << e << '\n';
        }
    } else if (axis == "tau") {
        require_nonempty(rc.taus, "ensemble.taus_us");
        auto f = ctx.open_csv(name);
        csv::Writer w(f);
        w.header({"tau_us", "decay_error", "decay_coefficient", "wall_time_s"});
        auto t0 = std::chrono::steady_clock::now();
        const double integral = decay_integral(rc.gate, rc.sequence);
        const double coefficient = integral / (4.0 * two_pi / rc.gate.omega_c);
        for (double tau : rc.taus) {
            const double e = integral / (4.0 * tau);
            w.row({coord(tau * 1e6), csv::number(e), csv::number(coefficient), csv::number(seconds_since(t0))});
            std::cout << tau * 1e6 << " us: decay " << e << '\n';
            t0 = std::chrono::steady_clock::now();
        }
    } else {
        throw ConfigError("axis", "unknown sweep axis '" + axis + "' (temperature, interaction, sigma, tau)");
    }
    ctx.announce(name);
    return ok;
}

int cmd_stark(const Context& ctx) {
    const StarkSettings& st = ctx.cfg.stark;
    double c2 = 0.0;
    if (st.c_factor_sq) {
        c2 = *st.c_factor_sq;
    } else if (st.species == "cesium") {
        const auto q = cesium_qubit_states();
        c2 = c_factor_squared(q[0], q[1]);
    } else {
        throw ConfigError("stark.c_factor_sq", "stark.c_factor_sq is required for species '" + st.species + "'");
    }
    const double delta = solve_compensation(st.omega_q, c2);
    const double ratio = solve_field_ratio(delta, st.relation);
    const double residual = field_ratio_residual(delta, ratio, st.relation);
    const double omega_eff = effective_rabi(st.rabi1, st.rabi2, delta);

    BalanceProblem bp = BalanceProblem::defaults_for(st.omega_q, c2);
    bp.relation = st.relation;
    if (st.delta_a) bp.delta_a = *st.delta_a;
    if (st.delta_b) bp.delta_b = *st.delta_b;
    const BalanceSolution bs = solve_target_balance(bp);

    const double ghz = two_pi * 1e9;
    std::cout << std::setprecision(6) << "species            " << st.species << "\nomega_q/2pi (GHz)  " << st.omega_q / ghz
              << "\nC^2                " << c2 << "\nDelta/2pi (GHz)    " << delta / ghz << "\n|E2/E1|            "
              << ratio << "\nOmega_eff/2pi (MHz) " << rad_per_s_to_mhz(omega_eff) << "\nbalance b_A, a_B, b_B  " << bs.b_a
              << ", " << bs.a_b << ", " << bs.b_b << "  (a_A = 1)\n";

    auto f = ctx.open_csv("stark.csv");
    csv::Writer w(f);
    w.header({"species", "omega_q_GHz", "c_factor_sq", "delta_GHz", "field_ratio", "field_ratio_residual",
              "omega_eff_MHz", "balance_delta_a_GHz", "balance_delta_b_GHz", "balance_b_a", "balance_a_b", "balance_b_b",
              "balance_max_residual"});
    w.row({st.species, coord(st.omega_q / ghz), csv::number(c2), csv::number(delta / ghz), csv::number(ratio),
           csv::number(residual), csv::number(rad_per_s_to_mhz(omega_eff)), csv::number(bp.delta_a / ghz),
           csv::number(bp.delta_b / ghz), csv::number(bs.b_a), csv::number(bs.a_b), csv::number(bs.b_b),
           csv::number(bs.residuals.cwiseAbs().maxCoeff())});
    ctx.announce("stark.csv");
    return ok;
}

int cmd_two_state(const Context& ctx) {
    const RunConfig& rc = ctx.cfg;
    const TwoStateReport r = two_state_tsd_demo(rc.demo_alpha, rc.demo_t0_fraction);
    std::cout << std::setprecision(6) << "alpha                 " << rc.demo_alpha << "\nrevival_overlap       "
              << r.revival_overlap << "\nground_revival_defect " << r.ground_revival_defect
              << "\nP_1r(t1)              " << r.population_1r_at_t1 << "\nP_1r(2 t1)            "
              << r.final_population_1r << '\n';
    {
        auto f = ctx.open_csv("two_state_summary.csv");
        csv::Writer w(f);
        w.header({"alpha", "t0_fraction", "revival_overlap", "ground_revival_defect", "P_1r_at_t1", "P_1r_final"});
        w.row({csv::number(rc.demo_alpha), coord(rc.demo_t0_fraction), csv::number(r.revival_overlap),
               csv::number(r.ground_revival_defect), csv::number(r.population_1r_at_t1), csv::number(r.final_population_1r)});
        ctx.announce("two_state_summary.csv");
    }
    auto f = ctx.open_csv("two_state_trace.csv");
    f << "# time in units of 1/Omega_t\n";
    write_record_csv(f, r.record);
    ctx.announce("two_state_trace.csv");
    return ok;
}

int cmd_check(const Context& ctx, bool quick) {
    CheckOptions opt;
    opt.workers = ctx.cfg.ensemble.workers;
    if (quick) {
        opt.route_draws = 5;
        opt.include_refinement = false;
    }
    bool all = true;
    for (const CheckResult& r : run_invariant_suite(opt)) {
        all = all && r.passed;
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << " (" << std::fixed
                  << std::setprecision(2) << r.seconds << " s)" << std::defaultfloat << '\n';
    }
    return all ? ok : runtime_failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transition-slow-down Rydberg CNOT simulator"};
    app.require_subcommand(1);
    Invocation inv;
    std::string axis;
    bool quick = false;

    auto common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", inv.config_file, "key=value config file with [section] headers");
        sub->add_option("-p,--preset", inv.preset, "named parameter set, applied before the config file");
        sub->add_option("-s,--set", inv.sets, "override, section.key=value (repeatable)");
        sub->add_option("-o,--out", inv.out_dir, "output directory (default: output.directory)");
        return sub;
    };
    auto* cnot = common(app.add_subcommand("cnot", "realized gate, errors, optional traces and Doppler averages"));
    auto* bell = common(app.add_subcommand("bell", "Bell-state preparation error"));
    auto* sweep = common(app.add_subcommand("sweep", "error table along one axis"));
    sweep->add_option("-a,--axis", axis, "temperature | interaction | sigma | tau")->required();
    auto* stark = common(app.add_subcommand("stark", "AC-Stark compensation point and balance"));
    auto* demo = common(app.add_subcommand("demo-two-state", "reduced three-level slow-down demonstration"));
    auto* check = common(app.add_subcommand("check", "runtime invariant suite"));
    check->add_flag("--quick", quick, "skip grid refinement, fewer route draws");
    app.add_subcommand("presets", "list preset names")->callback([] {
        for (const Preset& p : presets()) std::cout << p.name << "  " << p.label << '\n';
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : invalid_config;
    }
    if (app.got_subcommand("presets")) return ok;

    try {
        const Context ctx = load(inv);
        if (cnot->parsed()) return cmd_cnot(ctx);
        if (bell->parsed()) return cmd_bell(ctx);
        if (sweep->parsed()) return cmd_sweep(ctx, axis);
        if (stark->parsed()) return cmd_stark(ctx);
        if (demo->parsed()) return cmd_two_state(ctx);
        if (check->parsed()) return cmd_check(ctx, quick);
    } catch (const ConfigError& e) {
        std::cerr << "config error [" << e.key() << "]: " << e.what() << '\n';
        return invalid_config;
    } catch (const NoSolution& e) {
        std::cerr << "no solution: " << e.what() << '\n';
        return no_solution;
    } catch (const ConvergenceFailure& e) {
        std::cerr << "convergence failure: " << e.what() << '\n';
        return runtime_failure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return invalid_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return runtime_failure;
    }
    return runtime_failure;
}
