// scrollforge CLI: simulate writes trajectory/transition CSVs, analyze runs
// the chaos diagnostics into report.json + kc.csv, verify prints the
// per-piece equilibrium report. Exit codes: 0 success, 2 input error,
// 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "scrollforge/io.hpp"
#include "scrollforge/scrollforge.hpp"

namespace fs = std::filesystem;
using namespace scrollforge;

namespace {

PWLSystem resolve_system(const std::string& spec) {
    if (spec == "example1-double") return build_example1_double();
    if (spec == "example1-triple") return build_example1_triple();
    if (spec == "example2-triple") return build_example2_triple();
    if (spec.rfind("file:", 0) == 0) return load_system(spec.substr(5));
    throw std::invalid_argument(
        "unknown system '" + spec +
        "' (expected example1-double, example1-triple, example2-triple or file:<path>)");
}

Vec3 parse_x0(const std::string& s) {
    double a = 0, b = 0, c = 0;
    char trail = 0;
    if (std::sscanf(s.c_str(), "%lf ,%lf ,%lf %c", &a, &b, &c, &trail) != 3)
        throw std::invalid_argument("--x0 expects three comma-separated numbers, got '" + s + "'");
    return Vec3(a, b, c);
}

struct SimulateOpts {
    std::string system;
    std::string x0 = "0,0,0";
    double duration = 50.0;
    double step = 0.01;
    int sample_every = 1;
    std::string out_dir = ".";
};

struct AnalyzeOpts {
    std::string system;
    std::string x0 = "0,0,0";
    double duration = 500.0;
    double step = 0.01;
    int sample_every = 25;
    std::uint64_t seed = 42;
    int series_length = 2000;
    int c_count = 100;
    bool no_lle = false;
    bool no_k = false;
    std::string out_dir = ".";
};

// LLE runs on its own fine grid so that switching-surface crossings of the
// trajectory pair resolve into separate steps (see lle_benettin).
constexpr double kLleStep = 1e-4;
constexpr double kLleOffset = 1e-3;
constexpr double kLleTransient = 50.0;

int run_simulate(const SimulateOpts& opt) {
    PWLSystem sys = resolve_system(opt.system);
    auto scheme = ScrollRegionScheme::for_system(sys);

    IntegrationConfig cfg;
    cfg.step = opt.step;
    cfg.duration = opt.duration;
    cfg.sample_every = opt.sample_every;
    cfg.initial_state = parse_x0(opt.x0);
    Trajectory traj = integrate(sys, cfg, scheme.labeler());

    fs::create_directories(opt.out_dir);
    fs::path dir(opt.out_dir);
    {
        std::ofstream f(dir / "trajectory.csv");
        write_trajectory_csv(f, traj);
    }
    {
        std::ofstream f(dir / "transitions.csv");
        write_transitions_csv(f, traj);
    }

    double m1 = 0, m2 = 0, m3 = 0;
    for (const auto& x : traj.states) {
        m1 = std::max(m1, std::fabs(x.x));
        m2 = std::max(m2, std::fabs(x.y));
        m3 = std::max(m3, std::fabs(x.z));
    }
    std::printf("%s: %.6g s, %zu samples, %zu transitions\n", sys.name.c_str(), opt.duration,
                traj.size(), traj.transitions.size());
    std::printf("max |x1|=%.6g |x2|=%.6g |x3|=%.6g\n", m1, m2, m3);
    std::printf("wrote %s and %s\n", (dir / "trajectory.csv").c_str(),
                (dir / "transitions.csv").c_str());
    return 0;
}

int run_analyze(const AnalyzeOpts& opt) {
    PWLSystem sys = resolve_system(opt.system);
    auto scheme = ScrollRegionScheme::for_system(sys);
    Vec3 x0 = parse_x0(opt.x0);

    // Integrate at full step resolution so region labels and symbols cannot
    // skip the middle region between coarse samples; the 0-1 test series is
    // subsampled from the same states at stride sample_every.
    IntegrationConfig cfg;
    cfg.step = opt.step;
    cfg.duration = opt.duration;
    cfg.sample_every = 1;
    cfg.initial_state = x0;
    Trajectory traj = integrate(sys, cfg, scheme.labeler());

    ChaosReport report;
    report.symbols = symbol_sequence(traj);
    report.region_occupancy = occupancy(traj);

    if (!opt.no_k) {
        Chaos01Config ccfg;
        ccfg.c_values = sample_c_values(opt.c_count, opt.seed);
        ccfg.series_length = opt.series_length;
        KcResult k = chaos01_K(subsample(traj, opt.sample_every), ccfg);
        report.k_median = k.k_median;
        report.k_per_c = std::move(k.k_per_c);
    }
    if (!opt.no_lle) {
        IntegrationConfig lcfg;
        lcfg.step = kLleStep;
        lcfg.duration = opt.duration;
        lcfg.initial_state = x0;
        report.lle = lle_benettin(sys, lcfg, kLleOffset, 1, kLleTransient);
    }

    nlohmann::json doc = report_to_json(report);
    doc["system"] = sys.name;
    doc["x0"] = {x0.x, x0.y, x0.z};
    doc["step"] = opt.step;
    doc["duration"] = opt.duration;
    doc["sample_every"] = opt.sample_every;
    doc["tau"] = opt.step * opt.sample_every;
    doc["series_length"] = opt.series_length;
    doc["seed"] = opt.seed;

    fs::create_directories(opt.out_dir);
    fs::path dir(opt.out_dir);
    {
        std::ofstream f(dir / "report.json");
        f << doc.dump(2) << '\n';
    }
    if (!opt.no_k) {
        std::ofstream f(dir / "kc.csv");
        write_kc_csv(f, report.k_per_c);
    }

    std::printf("%s:", sys.name.c_str());
    if (report.k_median) std::printf(" K=%.4f", *report.k_median);
    if (report.lle) std::printf(" LLE=%.4f", *report.lle);
    std::printf(" symbols=%zu occupancy:", report.symbols.size());
    for (auto [r, f] : report.region_occupancy) std::printf(" %c=%.3f", r, f);
    std::printf("\nwrote %s\n", (dir / "report.json").c_str());
    return 0;
}

int run_verify(const std::string& system_spec) {
    PWLSystem sys = resolve_system(system_spec);
    EquilibriumReport rep = analyze_equilibria(sys);
    std::printf("%s: %zu pieces\n", sys.name.c_str(), sys.pieces.size());
    for (const auto& pe : rep.pieces) {
        std::printf("piece %2zu  rank %d  ", pe.piece_index + 1, pe.a_rank);
        if (!pe.affine_has_solutions) {
            std::printf("no rest points (b outside column span)\n");
        } else if (pe.a_rank == 3) {
            const Vec3& p = *pe.witness;
            std::printf("rest point (%.6g, %.6g, %.6g)  inside guard: %s\n", p.x, p.y, p.z,
                        pe.intersects_guard ? "yes" : "no");
        } else {
            std::printf("rest set (dim %d)  meets guard: %s%s\n", 3 - pe.a_rank,
                        pe.intersects_guard ? "yes" : "no", pe.exact ? "" : " (sampled probe)");
        }
    }
    std::printf("equilibrium-free: %s\n", rep.equilibrium_free ? "yes" : "no");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scrollforge: piecewise-linear multi-scroll attractor toolkit"};
    app.require_subcommand(1);

    SimulateOpts sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "integrate a system and export CSVs");
    sim_cmd->add_option("--system", sim.system,
                        "example1-double | example1-triple | example2-triple | file:<path>")
        ->required();
    sim_cmd->add_option("--x0", sim.x0, "initial state a,b,c")->capture_default_str();
    sim_cmd->add_option("--duration", sim.duration, "seconds")->capture_default_str();
    sim_cmd->add_option("--step", sim.step, "integration step")->capture_default_str();
    sim_cmd->add_option("--sample-every", sim.sample_every, "output stride")->capture_default_str();
    sim_cmd->add_option("--out", sim.out_dir, "output directory")
        ->envname("SCROLLFORGE_OUT")
        ->capture_default_str();

    AnalyzeOpts ana;
    CLI::App* ana_cmd = app.add_subcommand("analyze", "run chaos diagnostics into report.json");
    ana_cmd->add_option("--system", ana.system,
                        "example1-double | example1-triple | example2-triple | file:<path>")
        ->required();
    ana_cmd->add_option("--x0", ana.x0, "initial state a,b,c")->capture_default_str();
    ana_cmd->add_option("--duration", ana.duration, "seconds")->capture_default_str();
    ana_cmd->add_option("--step", ana.step, "integration step")->capture_default_str();
    ana_cmd->add_option("--sample-every", ana.sample_every, "0-1 test sampling stride")
        ->capture_default_str();
    ana_cmd->add_option("--seed", ana.seed, "seed for c-value sampling")->capture_default_str();
    ana_cmd->add_option("--n", ana.series_length, "0-1 test series length")->capture_default_str();
    ana_cmd->add_option("--c-count", ana.c_count, "number of c values")->capture_default_str();
    ana_cmd->add_flag("--no-lle", ana.no_lle, "skip the Lyapunov exponent");
    ana_cmd->add_flag("--no-k", ana.no_k, "skip the 0-1 test");
    ana_cmd->add_option("--out", ana.out_dir, "output directory")
        ->envname("SCROLLFORGE_OUT")
        ->capture_default_str();

    std::string verify_system;
    CLI::App* ver_cmd = app.add_subcommand("verify", "report per-piece equilibrium status");
    ver_cmd->add_option("--system", verify_system,
                        "example1-double | example1-triple | example2-triple | file:<path>")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim_cmd->parsed()) return run_simulate(sim);
        if (ana_cmd->parsed()) return run_analyze(ana);
        return run_verify(verify_system);
    } catch (const SchemaError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const DimensionError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
