// Command-line surface: configuration ingestion and the five commands
// (validate, steady-state, cycle, sweep, oracle-check).
//
// Exit codes: 0 success, 1 verification/computation failure, 2 configuration
// error (including malformed command lines).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tqe/config.hpp"
#include "tqe/cycle.hpp"
#include "tqe/errors.hpp"
#include "tqe/io.hpp"
#include "tqe/model.hpp"
#include "tqe/oracle.hpp"
#include "tqe/params.hpp"
#include "tqe/sampling.hpp"
#include "tqe/thermo.hpp"
#include "tqe/units.hpp"

using ordered_json = nlohmann::ordered_json;
using namespace tqe;

namespace {

const char* fi_name(FreqInterpretation f) {
    return f == FreqInterpretation::Detuning ? "detuning" : "labframe";
}
const char* tg_name(ThermalGap t) {
    return t == ThermalGap::RotatingFrame ? "rotatingframe" : "labframe";
}
const char* gc_name(GammaConvention g) {
    return g == GammaConvention::Net ? "net" : "bare";
}

std::string joined(const std::filesystem::path& dir, const char* name) {
    return (std::filesystem::path(dir) / name).string();
}

int cmd_validate(const RunConfig& cfg) {
    const EngineParameters p = cfg.engine();  // validates, throws on error
    const double beta_lo =
        thermal_gap_value(p, {p.omega_knob_range[0], 0.0}) / p.temperature_freq;
    const double beta_hi =
        thermal_gap_value(p, {p.omega_knob_range[1], 0.0}) / p.temperature_freq;
    const double a_top = std::abs(cavity_amplitude(p, p.drive_knob_range[1]));

    std::printf("configuration valid\n");
    std::printf("internal units: hbar = k_B = 1, frequencies in rad/s\n");
    std::printf("omega_cpw = %s rad/s\n", fmt17(p.omega_cpw).c_str());
    std::printf("omega_pump = %s rad/s\n", fmt17(p.omega_pump).c_str());
    std::printf("g_over_hbar = %s rad/s\n", fmt17(p.g_over_hbar).c_str());
    std::printf("temperature (k_B T / hbar) = %s rad/s\n",
                fmt17(p.temperature_freq).c_str());
    std::printf("gamma_quoted = %s rad/s\n", fmt17(p.gamma_minus_net).c_str());
    std::printf("kappa = %s rad/s\n", fmt17(p.kappa_cpw).c_str());
    std::printf("omega_knob_range = [%s, %s] rad/s\n",
                fmt17(p.omega_knob_range[0]).c_str(),
                fmt17(p.omega_knob_range[1]).c_str());
    std::printf("drive_knob_range = [%s, %s] rad/s\n",
                fmt17(p.drive_knob_range[0]).c_str(),
                fmt17(p.drive_knob_range[1]).c_str());
    std::printf("freq_interpretation = %s\n", fi_name(p.freq_interpretation));
    std::printf("thermal_gap = %s\n", tg_name(p.thermal_gap));
    std::printf("gamma_convention = %s\n", gc_name(p.gamma_convention));
    std::printf("thermal gap over temperature at omega range ends = [%s, %s]\n",
                fmt17(beta_lo).c_str(), fmt17(beta_hi).c_str());
    std::printf("cavity amplitude |<a>| at drive range top = %s\n",
                fmt17(a_top).c_str());
    std::printf("resolution = %d\n", cfg.resolution);
    std::printf("points_per_stroke = %d\n", cfg.points_per_stroke);
    std::printf("samples = %d\n", cfg.samples);
    std::printf("seed = %llu\n", cfg.seed);
    std::printf("out_dir = %s\n", cfg.out_dir.c_str());
    return 0;
}

int cmd_steady_state(const RunConfig& cfg, double omega_mhz, double e_mhz,
                     const std::string& out_dir) {
    const EngineParameters p = cfg.engine();
    const Knobs k{std::isnan(omega_mhz) ? p.omega_knob_range[1]
                                        : mhz_to_rad(omega_mhz),
                  std::isnan(e_mhz) ? p.drive_knob_range[1]
                                    : mhz_to_rad(e_mhz)};
    require_in_range(p, k);

    const QubitDensityMatrix rho = steady_state_analytic(p, k);
    const BlochVector b = bloch_vector(rho);
    const double energy = internal_energy(p, k);

    ordered_json j;
    j["omega_t_rad_s"] = k.omega_t;
    j["drive_rad_s"] = k.drive;
    j["omega_t_over_2pi_mhz"] = rad_to_mhz(k.omega_t);
    j["drive_over_2pi_hbar_mhz"] = rad_to_mhz(k.drive);
    j["rho_ee"] = rho.ee();
    j["rho_eg_re"] = rho.eg().real();
    j["rho_eg_im"] = rho.eg().imag();
    j["entropy_nats"] = von_neumann_entropy(rho);
    j["bloch"] = {{"x", b.x}, {"y", b.y}, {"z", b.z}};
    j["internal_energy_hbar_rad_s"] = energy;
    j["internal_energy_hbar_2pi_mhz"] = rad_to_mhz(energy);

    const std::string text = j.dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
    if (!out_dir.empty())
        write_text_file(joined(out_dir, "steady_state.json"), text);
    return 0;
}

int cmd_cycle(const RunConfig& cfg, double omega1_mhz, double e1_mhz,
              const std::string& out_dir) {
    const EngineParameters p = cfg.engine();
    const double w1 = std::isnan(omega1_mhz) ? p.omega_knob_range[1]
                                             : mhz_to_rad(omega1_mhz);
    const double e1 = std::isnan(e1_mhz) ? p.drive_knob_range[1]
                                         : mhz_to_rad(e1_mhz);
    const Cycle cyc = build_cycle(p, w1, e1, cfg.points_per_stroke);
    const CycleEnergetics e = cycle_energetics(p, cyc.strokes);
    const std::string csv = cycle_csv(cyc, e);
    std::fputs(csv.c_str(), stdout);

    if (!out_dir.empty()) {
        ordered_json j;
        j["omega0_rad_s"] = cyc.spec.omega0;
        j["omega1_rad_s"] = cyc.spec.omega1;
        j["e0_rad_s"] = cyc.spec.e0;
        j["e1_rad_s"] = cyc.spec.e1;
        j["points_per_stroke"] = cyc.spec.points_per_stroke;
        j["total_work_hbar_rad_s"] = e.total_work;
        j["total_heat_hbar_rad_s"] = e.total_heat;
        j["q_plus_hbar_rad_s"] = e.q_plus;
        j["total_passive_heat_hbar_rad_s"] = e.total_passive_heat;
        j["total_ergotropy_change_hbar_rad_s"] = e.total_ergotropy_change;
        j["first_law_residual_hbar_rad_s"] = e.total_work + e.total_heat;
        if (e.has_efficiency)
            j["efficiency"] = e.efficiency;
        else
            j["efficiency"] = nullptr;
        write_text_file(joined(out_dir, "cycle.csv"), csv);
        write_text_file(joined(out_dir, "cycle_summary.json"),
                        j.dump(2) + "\n");
    }
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out_override) {
    const EngineParameters p = cfg.engine();
    const std::string dir = out_override.empty() ? cfg.out_dir : out_override;

    const SurfaceGrid entropy = entropy_surface(p, cfg.resolution);
    const auto [population, coherence] = state_surfaces(p, cfg.resolution);
    const SurfaceGrid efficiency =
        efficiency_map(p, cfg.resolution, cfg.points_per_stroke);
    const MaxEfficiency best = find_max_efficiency(efficiency);

    write_text_file(joined(dir, "entropy.csv"), surface_csv(entropy));
    write_text_file(joined(dir, "population.csv"), surface_csv(population));
    write_text_file(joined(dir, "coherence.csv"), surface_csv(coherence));
    write_text_file(joined(dir, "efficiency.csv"), surface_csv(efficiency));

    ordered_json j;
    j["resolution"] = cfg.resolution;
    j["points_per_stroke"] = cfg.points_per_stroke;
    j["omega1_rad_s"] = best.omega1;
    j["e1_rad_s"] = best.e1;
    j["omega1_over_2pi_mhz"] = rad_to_mhz(best.omega1);
    j["e1_over_2pi_hbar_mhz"] = rad_to_mhz(best.e1);
    j["max_efficiency"] = best.eta;
    const std::string text = j.dump(2) + "\n";
    write_text_file(joined(dir, "max_efficiency.json"), text);
    std::fputs(text.c_str(), stdout);
    return 0;
}

int cmd_oracle_check(const RunConfig& cfg, bool joint_check) {
    const EngineParameters p = cfg.engine();
    EngineParameters flipped = p;
    flipped.gamma_convention = p.gamma_convention == GammaConvention::Net
                                   ? GammaConvention::Bare
                                   : GammaConvention::Net;

    std::printf("oracle-check: %d samples, seed %llu\n", cfg.samples,
                cfg.seed);

    // The closed form under the configured rate reading, against the
    // Liouvillian null space under each reading of the quoted rate.
    double max_same = 0.0, max_flip = 0.0;
    Knobs worst{p.omega_knob_range[0], p.drive_knob_range[0]};
    UniformSampler sampler(cfg.seed);
    for (int i = 0; i < cfg.samples; ++i) {
        const Knobs k = sampler.knobs_in_window(p);
        const MatrixXc ana = steady_state_analytic(p, k).mat;
        const double d_same =
            trace_distance(ana, steady_state_nullspace(qubit_liouvillian(p, k)));
        const double d_flip = trace_distance(
            ana, steady_state_nullspace(qubit_liouvillian(flipped, k)));
        if (d_same > max_same) {
            max_same = d_same;
            worst = k;
        }
        max_flip = std::max(max_flip, d_flip);
    }

    std::printf(
        "closed form vs null space [gamma_convention=%s]: "
        "max trace distance = %.3e\n",
        gc_name(p.gamma_convention), max_same);
    std::printf("  worst knob point: omega_t/2pi = %s MHz, "
                "drive/2pi = %s MHz\n",
                fmt17(rad_to_mhz(worst.omega_t)).c_str(),
                fmt17(rad_to_mhz(worst.drive)).c_str());
    std::printf(
        "closed form vs null space [gamma_convention=%s]: "
        "max trace distance = %.3e\n",
        gc_name(flipped.gamma_convention), max_flip);

    bool ok = true;
    if (max_same < 1e-8 && max_flip >= 1e-8) {
        std::printf(
            "verdict: gamma_convention=%s is the consistent reading of the "
            "quoted rate (threshold 1e-8)\n",
            gc_name(p.gamma_convention));
    } else if (max_same < 1e-8) {
        std::printf(
            "verdict: ambiguous; both rate readings agree with the closed "
            "form (threshold 1e-8)\n");
    } else {
        std::printf(
            "verdict: FAIL; closed form differs from the null space by "
            "%.3e (threshold 1e-8) at the knob point above\n",
            max_same);
        ok = false;
    }

    if (joint_check) {
        auto clamp = [](double v, const std::array<double, 2>& r) {
            return std::min(r[1], std::max(r[0], v));
        };
        // Monotone coupling scan at a low drive (small cavity cutoff keeps
        // the full-coupling solve dense-feasible), plus the 1/100 operating
        // point at a moderate drive.
        const Knobs k_seq{clamp(mhz_to_rad(500.0), p.omega_knob_range),
                          clamp(mhz_to_rad(0.2), p.drive_knob_range)};
        const Knobs k_op{k_seq.omega_t,
                         clamp(mhz_to_rad(0.5), p.drive_knob_range)};
        std::printf(
            "joint-model reduction, coupling scan at omega_t/2pi = %s MHz, "
            "drive/2pi = %s MHz:\n",
            fmt17(rad_to_mhz(k_seq.omega_t)).c_str(),
            fmt17(rad_to_mhz(k_seq.drive)).c_str());
        std::vector<double> dists;
        bool joint_ok = true;
        try {
            for (const double scale : {1.0, 0.5, 0.25, 0.125}) {
                EngineParameters ps = p;
                ps.g_over_hbar *= scale;
                const JointSolution sol = solve_joint_steady(ps, k_seq);
                const double d = trace_distance(
                    reduced_qubit_state(sol.rho, sol.trunc),
                    steady_state_analytic(ps, k_seq));
                dists.push_back(d);
                std::printf("  g x %-5g: n_max = %d, trace distance to the "
                            "closed form = %.3e\n",
                            scale, sol.trunc.n_max, d);
            }
            for (size_t i = 1; i < dists.size(); ++i)
                if (!(dists[i] < dists[i - 1])) joint_ok = false;
            std::printf("  monotone decrease along the scan: %s\n",
                        joint_ok ? "yes" : "NO");

            EngineParameters p100 = p;
            p100.g_over_hbar /= 100.0;
            const JointSolution sol = solve_joint_steady(p100, k_op);
            const double d100 = trace_distance(
                reduced_qubit_state(sol.rho, sol.trunc),
                steady_state_analytic(p100, k_op));
            std::printf(
                "  g x 0.01 at drive/2pi = %s MHz: n_max = %d, trace "
                "distance = %.3e (threshold 1e-3)\n",
                fmt17(rad_to_mhz(k_op.drive)).c_str(), sol.trunc.n_max, d100);
            if (!(d100 < 1e-3)) joint_ok = false;
        } catch (const std::exception& e) {
            std::printf("  joint check failed: %s\n", e.what());
            joint_ok = false;
        }
        if (!joint_ok) ok = false;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "driven-transmon heat engine: stationary states, quasi-static "
        "strokes, efficiency sweeps, and oracle cross-checks"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path, out_dir;
    double omega_mhz = 0.0, e_mhz = 0.0;
    int resolution = 0, pts = 0, samples = 0;
    unsigned long long seed = 0;
    bool joint = false;

    app.add_option("--config", config_path,
                   "configuration file (key = value lines)");

    CLI::App* c_validate = app.add_subcommand(
        "validate", "check the configuration and echo internal units");
    CLI::App* c_ss = app.add_subcommand(
        "steady-state", "stationary state at one knob point (JSON)");
    CLI::App* c_cycle = app.add_subcommand(
        "cycle", "energetics of one four-stroke cycle (CSV)");
    CLI::App* c_sweep = app.add_subcommand(
        "sweep", "surface and efficiency-map sweep (CSV + JSON)");
    CLI::App* c_oracle = app.add_subcommand(
        "oracle-check", "closed form vs dense-Liouvillian cross-check");
    (void)c_validate;

    for (CLI::App* c : {c_ss, c_cycle}) {
        c->add_option("--omega1-mhz", omega_mhz,
                      "omega knob / 2pi in MHz (default: range top)");
        c->add_option("--e1-mhz", e_mhz,
                      "drive knob / 2pi hbar in MHz (default: range top)");
    }
    for (CLI::App* c : {c_cycle, c_sweep})
        c->add_option("--points-per-stroke", pts,
                      "sample points per stroke integral");
    c_sweep->add_option("--resolution", resolution, "grid nodes per axis");
    c_oracle->add_option("--samples", samples, "random knob points to check");
    c_oracle->add_option("--seed", seed, "sampler seed");
    c_oracle->add_flag("--joint-check", joint,
                       "also cross-check the two-subsystem reduction");
    for (CLI::App* c : {c_ss, c_cycle, c_sweep})
        c->add_option("--out", out_dir, "directory for output files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // malformed command line == configuration error
    }

    try {
        RunConfig cfg = load_config(config_path);
        // Command-line values override file and environment settings through
        // the same validated assignment path.
        if (c_sweep->count("--resolution"))
            config_set(cfg, "resolution", std::to_string(resolution));
        if (c_cycle->count("--points-per-stroke") ||
            c_sweep->count("--points-per-stroke"))
            config_set(cfg, "points_per_stroke", std::to_string(pts));
        if (c_oracle->count("--samples"))
            config_set(cfg, "samples", std::to_string(samples));
        if (c_oracle->count("--seed")) cfg.seed = seed;

        const bool omega_set =
            c_ss->count("--omega1-mhz") || c_cycle->count("--omega1-mhz");
        const bool e_set =
            c_ss->count("--e1-mhz") || c_cycle->count("--e1-mhz");
        const double omega_arg =
            omega_set ? omega_mhz : std::numeric_limits<double>::quiet_NaN();
        const double e_arg =
            e_set ? e_mhz : std::numeric_limits<double>::quiet_NaN();

        if (app.got_subcommand(c_validate)) return cmd_validate(cfg);
        if (app.got_subcommand(c_ss))
            return cmd_steady_state(cfg, omega_arg, e_arg, out_dir);
        if (app.got_subcommand(c_cycle))
            return cmd_cycle(cfg, omega_arg, e_arg, out_dir);
        if (app.got_subcommand(c_sweep)) return cmd_sweep(cfg, out_dir);
        if (app.got_subcommand(c_oracle)) return cmd_oracle_check(cfg, joint);
        std::fprintf(stderr, "configuration error: no command given\n");
        return 2;
    } catch (const configuration_error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
