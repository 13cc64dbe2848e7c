#include "hjbfem/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "hjbfem/assembly.hpp"
#include "hjbfem/errors.hpp"
#include "hjbfem/format.hpp"
#include "hjbfem/mesh.hpp"
#include "hjbfem/parallel.hpp"
#include "hjbfem/problems.hpp"
#include "hjbfem/timestepper.hpp"

namespace hjb {

namespace {

namespace fs = std::filesystem;

struct RunConfig {
    std::string problem = "triangle";
    std::string mesh_path;
    int refine = 1;
    int n_beta = 32;
    std::string dt_law;
    double dt_ratio = 0.0;
    bool dt_auto = false;
    double t_final = 0.0;
    std::string out_dir = "out";
    std::vector<std::string> emit{"csv"};
    unsigned threads = 1;
    int levels = 3;
    int side_rows = 10;
    bool global_diffusion = false;
    int alpha_samples = 0;
    bool jacobi = false;
    std::string config_path;

    CLI::Option* ratio_opt = nullptr;
    CLI::Option* t_final_opt = nullptr;

    bool emits(const std::string& kind) const { return std::find(emit.begin(), emit.end(), kind) != emit.end(); }
    bool has_ratio() const { return ratio_opt && ratio_opt->count() > 0; }
    bool has_t_final() const { return t_final_opt && t_final_opt->count() > 0; }

    StepLaw law() const {
        if (dt_law.empty()) return problem == "triangle" ? StepLaw::quadratic : StepLaw::linear;
        return dt_law == "linear" ? StepLaw::linear : StepLaw::quadratic;
    }
};

const char* law_name(StepLaw law) { return law == StepLaw::linear ? "linear" : "quadratic"; }

void add_run_options(CLI::App* sub, RunConfig& cfg, bool study) {
    sub->add_option("--problem", cfg.problem, "Benchmark")
        ->check(CLI::IsMember({"triangle", "eikonal", "fullynl"}))
        ->capture_default_str();
    sub->add_option("--mesh", cfg.mesh_path, "Base mesh (.mesh2); default: built-in domain")->check(CLI::ExistingFile);
    sub->add_option("--refine", cfg.refine, "Uniform refinements of the base mesh")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--n-beta", cfg.n_beta, "Number of advection directions")
        ->check(CLI::Range(3, 1 << 20))
        ->capture_default_str();
    sub->add_option("--dt-law", cfg.dt_law, "Step law for --dt-ratio")->check(CLI::IsMember({"linear", "quadratic"}));
    cfg.ratio_opt = sub->add_option("--dt-ratio", cfg.dt_ratio, "h = ratio * dx^p")->check(CLI::PositiveNumber);
    auto* auto_opt = sub->add_flag("--dt-auto", cfg.dt_auto, "h = 0.9 of the smallest CFL bound of a dry run");
    cfg.ratio_opt->excludes(auto_opt);
    cfg.t_final_opt = sub->add_option("--t-final", cfg.t_final, "Override the horizon T")->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--emit", cfg.emit, "Outputs: csv, vtk, trajectory, diffusion")
        ->delimiter(',')
        ->check(CLI::IsMember({"csv", "vtk", "trajectory", "diffusion"}))
        ->capture_default_str();
    sub->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
    if (study) {
        sub->add_option("--levels", cfg.levels, "Refinement levels")->check(CLI::Range(2, 12))->capture_default_str();
    }
    sub->add_option("--side-rows", cfg.side_rows, "Rows of the built-in lattice domain")
        ->check(CLI::Range(4, 4096))
        ->capture_default_str();
    sub->add_flag("--global-diffusion", cfg.global_diffusion, "One artificial diffusion constant for all nodes");
    sub->add_option("--alpha-samples", cfg.alpha_samples, "Interior diffusion samples (fullynl)")
        ->check(CLI::Range(0, 1000))
        ->capture_default_str();
    sub->add_flag("--jacobi", cfg.jacobi, "Jacobi-preconditioned GMRES");
    sub->add_option("--config", cfg.config_path, "key=value file with the same keys as the flags; flags override");
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) throw std::runtime_error("error writing " + path.string());
}

template <class Fn>
void write_file(const fs::path& path, Fn&& fn) {
    auto out = open_output(path);
    fn(out);
    close_output(out, path);
}

Mesh base_mesh(const RunConfig& cfg) {
    if (!cfg.mesh_path.empty()) return read_mesh_file(cfg.mesh_path);
    if (cfg.problem == "triangle") return triangle_problem(3).mesh;
    return lattice_domain(cfg.side_rows);
}

void require_acute(const Mesh& mesh) {
    const auto stats = check_acute(mesh);
    if (!stats.is_strictly_acute) {
        throw MeshError("mesh is not strictly acute (largest angle " +
                        format_double(stats.max_angle * 180.0 / std::numbers::pi) + " degrees)");
    }
}

std::vector<double> alpha_levels(int samples) {
    std::vector<double> out;
    for (int i = 1; i <= samples; ++i) out.push_back(kAlpha0 + (kAlpha1 - kAlpha0) * i / (samples + 1));
    return out;
}

SolveOptions solve_options(const RunConfig& cfg) {
    SolveOptions opts;
    opts.splitting.explicit_mode = cfg.global_diffusion ? DiffusionMode::global : DiffusionMode::local;
    opts.linear.jacobi = cfg.jacobi;
    return opts;
}

struct Manifest {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(std::string key, std::string value) { entries.emplace_back(std::move(key), std::move(value)); }
    void add(std::string key, double value) { add(std::move(key), format_double(value)); }
    void add(std::string key, std::size_t value) { add(std::move(key), std::to_string(value)); }
    void add(std::string key, int value) { add(std::move(key), std::to_string(value)); }

    void write(const fs::path& path) const {
        write_file(path, [&](std::ostream& out) {
            for (const auto& [k, v] : entries) out << k << '=' << v << '\n';
        });
    }
};

Manifest config_manifest(const std::string& command, const RunConfig& cfg, bool study) {
    Manifest m;
    m.add("command", command);
    m.add("problem", cfg.problem);
    m.add("mesh", cfg.mesh_path.empty() ? std::string("builtin") : cfg.mesh_path);
    m.add("refine", cfg.refine);
    m.add("n-beta", cfg.n_beta);
    m.add("dt-law", law_name(cfg.law()));
    m.add("dt-ratio", cfg.has_ratio() ? format_double(cfg.dt_ratio) : std::string("auto"));
    if (cfg.has_t_final()) m.add("t-final", cfg.t_final);
    m.add("out", cfg.out_dir);
    std::string emit;
    for (const auto& e : cfg.emit) emit += (emit.empty() ? "" : ",") + e;
    m.add("emit", emit);
    m.add("threads", static_cast<int>(cfg.threads));
    if (study) m.add("levels", cfg.levels);
    m.add("side-rows", cfg.side_rows);
    m.add("global-diffusion", std::string(cfg.global_diffusion ? "true" : "false"));
    m.add("alpha-samples", cfg.alpha_samples);
    m.add("jacobi", std::string(cfg.jacobi ? "true" : "false"));
    return m;
}

struct SolveSetup {
    HJBProblem problem;
    std::optional<ExactSolution> exact;
};

SolveSetup make_problem(const RunConfig& cfg, const Mesh& mesh) {
    if (cfg.alpha_samples > 0 && cfg.problem != "fullynl") throw InputError("--alpha-samples applies to fullynl only");
    if (cfg.problem == "triangle") {
        auto bench = triangle_problem(cfg.n_beta, cfg.has_t_final() ? cfg.t_final : 1.0);
        return {std::move(bench.problem), std::move(bench.exact)};
    }
    if (cfg.problem == "eikonal") {
        std::optional<double> horizon;
        if (cfg.has_t_final()) horizon = cfg.t_final;
        return {eikonal_problem(mesh, cfg.n_beta, horizon), std::nullopt};
    }
    auto prob = fully_nonlinear_problem(mesh, cfg.n_beta, alpha_levels(cfg.alpha_samples));
    if (cfg.has_t_final()) prob.horizon = cfg.t_final;
    return {std::move(prob), std::nullopt};
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    set_thread_count(cfg.threads);
    Mesh mesh = uniform_refine(base_mesh(cfg), cfg.refine);
    require_acute(mesh);
    const auto geom = p1_geometry(mesh);
    auto setup = make_problem(cfg, mesh);
    const HJBProblem& problem = setup.problem;
    auto opts = solve_options(cfg);

    TimeGrid grid;
    if (cfg.has_ratio()) {
        grid = make_time_grid(problem.horizon, geom.dx, cfg.dt_ratio, cfg.law());
    } else {
        grid = time_grid_for_step(problem.horizon, auto_time_step(problem, mesh, geom, opts.splitting));
    }

    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    if (cfg.emits("trajectory")) fs::create_directories(dir / "trajectory");

    std::ostringstream newton_rows;
    newton_rows << "step,t,iterations\n";
    opts.on_step = [&](const StepInfo& info) {
        newton_rows << info.step << ',' << format_double(info.t) << ',' << info.newton->iterations << '\n';
        if (cfg.emits("trajectory")) {
            const Snapshot snap{info.t, std::vector<double>(info.values.begin(), info.values.end())};
            const auto path = dir / "trajectory" / ("v_" + std::to_string(info.step) + ".vtk");
            write_file(path, [&](std::ostream& os) { write_vtk(os, mesh, snap); });
        }
    };

    const auto res = backward_solve(problem, mesh, geom, grid, opts);

    if (cfg.emits("csv")) {
        write_file(dir / "solution.csv", [&](std::ostream& os) { write_snapshot_csv(os, mesh, res.initial); });
    }
    if (cfg.emits("vtk")) {
        write_file(dir / "solution.vtk", [&](std::ostream& os) { write_vtk(os, mesh, res.initial); });
    }
    if (cfg.emits("diffusion") && !res.profiles.empty()) {
        write_file(dir / "diffusion.csv",
                   [&](std::ostream& os) { write_diffusion_csv(os, mesh, res.profiles.front()); });
    }
    write_file(dir / "newton.csv", [&](std::ostream& os) { os << newton_rows.str(); });
    write_file(dir / "newton_summary.csv", [&](std::ostream& os) {
        write_newton_csv(os, {{0, res.newton.n_systems, grid.n_steps, res.newton.mean, res.newton.std}});
    });
    if (cfg.problem == "fullynl") {
        write_file(dir / "policy.csv",
                   [&](std::ostream& os) { write_policy_csv(os, mesh, problem, res.final_policy); });
    }

    double linf = 0.0;
    for (double v : res.initial.values) linf = std::max(linf, std::abs(v));

    auto manifest = config_manifest("solve", cfg, false);
    manifest.add("horizon", problem.horizon);
    manifest.add("n-interior", mesh.n_interior());
    manifest.add("dx", geom.dx);
    manifest.add("h", grid.step);
    manifest.add("n-steps", grid.n_steps);
    manifest.add("min-cfl-step", res.min_cfl_step);
    manifest.write(dir / "run.txt");

    out << "n_interior " << mesh.n_interior() << '\n';
    out << "steps " << grid.n_steps << '\n';
    out << "h " << format_double(grid.step) << '\n';
    out << "linf " << format_double(linf) << '\n';
    out << "newton_mean " << format_double(res.newton.mean) << '\n';
    if (setup.exact) {
        const auto rep = error_norms(res.initial, *setup.exact, mesh, geom);
        out << "err_l2 " << format_double(rep.err_l2) << '\n';
        out << "err_linf " << format_double(rep.err_linf) << '\n';
        out << "err_h1 " << format_double(rep.err_h1) << '\n';
    }
    for (const auto& w : res.warnings) out << "warning: " << w << '\n';
    return kExitOk;
}

int cmd_study(const RunConfig& cfg, std::ostream& out) {
    set_thread_count(cfg.threads);
    if (cfg.has_t_final() && cfg.problem != "triangle") {
        throw InputError("--t-final is only supported by the triangle study");
    }
    if (cfg.alpha_samples > 0 && cfg.problem != "fullynl") throw InputError("--alpha-samples applies to fullynl only");
    const Mesh base = base_mesh(cfg);
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    auto opts = solve_options(cfg);
    auto manifest = config_manifest("study", cfg, true);

    auto level_outputs = [&](int level, const Mesh& mesh, const SolveResult& res) {
        const std::string suffix = "_L" + std::to_string(level);
        if (cfg.emits("csv")) {
            write_file(dir / ("solution" + suffix + ".csv"),
                       [&](std::ostream& os) { write_snapshot_csv(os, mesh, res.initial); });
        }
        if (cfg.emits("vtk")) {
            write_file(dir / ("solution" + suffix + ".vtk"),
                       [&](std::ostream& os) { write_vtk(os, mesh, res.initial); });
        }
        if (cfg.emits("diffusion") && !res.profiles.empty()) {
            write_file(dir / ("diffusion" + suffix + ".csv"),
                       [&](std::ostream& os) { write_diffusion_csv(os, mesh, res.profiles.front()); });
        }
        out << "level " << level << " done (" << mesh.n_interior() << " interior nodes)\n";
    };

    if (cfg.problem == "triangle") {
        auto bench = triangle_problem(cfg.n_beta, cfg.has_t_final() ? cfg.t_final : 1.0);
        bench.mesh = base;
        require_acute(bench.mesh);
        StudyOptions so;
        so.law = cfg.law();
        if (cfg.has_ratio()) so.ratio = cfg.dt_ratio;
        so.first_refine = cfg.refine;
        so.solve = opts;
        so.on_level = level_outputs;
        const auto result = convergence_study(bench, cfg.levels, so);
        write_file(dir / "errors.csv", [&](std::ostream& os) { write_errors_csv(os, result.reports); });
        manifest.add("resolved-ratio", result.ratio);
        for (const auto& r : result.reports) {
            out << "level " << r.level << " dx " << format_double(r.dx) << " h " << format_double(r.h) << " err_l2 "
                << format_double(r.err_l2) << " err_linf " << format_double(r.err_linf) << " err_h1 "
                << format_double(r.err_h1) << '\n';
        }
        if (result.rates) {
            out << "rate_l2 " << format_double((*result.rates)[0]) << '\n';
            out << "rate_linf " << format_double((*result.rates)[1]) << '\n';
            out << "rate_h1 " << format_double((*result.rates)[2]) << '\n';
        }
    } else if (cfg.problem == "eikonal") {
        const Mesh coarse = uniform_refine(base, cfg.refine);
        require_acute(coarse);
        EikonalStudyOptions eo;
        eo.n_beta = cfg.n_beta;
        if (cfg.has_ratio()) eo.ratio = cfg.dt_ratio;
        eo.solve = opts;
        eo.on_level = level_outputs;
        const auto levels = eikonal_study(coarse, cfg.levels, eo);
        write_file(dir / "eikonal.csv", [&](std::ostream& os) { write_eikonal_csv(os, levels); });
        for (const auto& l : levels) {
            out << "level " << l.level << " n_interior " << l.n_interior << " avg_nu " << format_double(l.avg_nu)
                << " linf " << format_double(l.linf_solution) << " oracle " << format_double(l.oracle_max_distance)
                << '\n';
        }
    } else {
        const Mesh coarse = uniform_refine(base, cfg.refine);
        require_acute(coarse);
        NewtonStudyOptions no;
        no.n_beta = cfg.n_beta;
        no.extra_levels = alpha_levels(cfg.alpha_samples);
        if (cfg.has_ratio()) no.ratio = cfg.dt_ratio;
        no.solve = opts;
        no.on_level = [&](int level, const Mesh& mesh, const SolveResult& res) {
            level_outputs(level, mesh, res);
            const auto problem = fully_nonlinear_problem(mesh, cfg.n_beta, no.extra_levels);
            write_file(dir / ("policy_L" + std::to_string(level) + ".csv"),
                       [&](std::ostream& os) { write_policy_csv(os, mesh, problem, res.final_policy); });
        };
        const auto levels = newton_study(coarse, cfg.levels, no);
        write_file(dir / "newton.csv", [&](std::ostream& os) { write_newton_csv(os, levels); });
        for (const auto& l : levels) {
            out << "level " << l.level << " n_systems " << l.n_systems << " steps " << l.steps << " avg_iters "
                << format_double(l.avg_iters) << " std_iters " << format_double(l.std_iters) << '\n';
        }
    }
    manifest.write(dir / "run.txt");
    return kExitOk;
}

int cmd_mesh_info(const std::string& path, std::ostream& out) {
    const Mesh mesh = read_mesh_file(path);
    const auto stats = check_acute(mesh);
    const auto geom = p1_geometry(mesh);
    const double deg = 180.0 / std::numbers::pi;
    out << "vertices " << stats.n_vertices << '\n';
    out << "interior " << stats.n_interior << '\n';
    out << "boundary " << mesh.boundary_nodes().size() << '\n';
    out << "triangles " << stats.n_triangles << '\n';
    out << "area " << format_double(mesh.total_area()) << '\n';
    out << "dx " << format_double(geom.dx) << '\n';
    out << "min_angle_deg " << format_double(stats.min_angle * deg) << '\n';
    out << "max_angle_deg " << format_double(stats.max_angle * deg) << '\n';
    out << "strictly_acute " << (stats.is_strictly_acute ? "true" : "false") << '\n';
    return kExitOk;
}

int cmd_mesh_refine(const std::string& path, int times, const std::string& out_dir, std::ostream& out) {
    const Mesh mesh = read_mesh_file(path);
    const Mesh fine = uniform_refine(mesh, times);
    const fs::path in(path);
    const fs::path dir = out_dir.empty() ? in.parent_path() : fs::path(out_dir);
    if (!dir.empty()) fs::create_directories(dir);
    const fs::path target = dir / (in.stem().string() + ".r" + std::to_string(times) + ".mesh2");
    write_mesh_file(target, fine);
    out << target.string() << '\n';
    return kExitOk;
}

int cmd_mesh_check(const std::string& path, std::ostream& out) {
    const Mesh mesh = read_mesh_file(path);
    const auto stats = check_acute(mesh);
    const double deg = 180.0 / std::numbers::pi;
    if (stats.is_strictly_acute) {
        out << "strictly acute (max angle " << format_double(stats.max_angle * deg) << " degrees)\n";
        return kExitOk;
    }
    out << "not strictly acute (max angle " << format_double(stats.max_angle * deg) << " degrees)\n";
    return kExitNotAcute;
}

int cmd_mesh_generate(const std::string& kind, int divisions, int side_rows, const std::string& target,
                      std::ostream& out) {
    const Mesh mesh = kind == "triangle" ? equilateral_triangle_mesh(divisions) : lattice_domain(side_rows);
    const fs::path path(target);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_mesh_file(path, mesh);
    out << path.string() << '\n';
    return kExitOk;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

// Splices the entries of a `--config FILE` into the argument list right after
// the subcommand name, skipping keys that are also given as flags.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].starts_with("--config=")) path = args[i].substr(9);
    }
    if (path.empty() || args.empty()) return args;
    std::ifstream in(path);
    if (!in) throw InputError("cannot read config file " + path);
    auto given = [&](const std::string& key) {
        for (const auto& a : args) {
            if (a == "--" + key || a.starts_with("--" + key + "=")) return true;
        }
        return false;
    };
    std::vector<std::string> extra;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw InputError(path + ":" + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim(std::string_view(text).substr(0, eq));
        const std::string value = trim(std::string_view(text).substr(eq + 1));
        if (key.empty() || key == "config") {
            throw InputError(path + ":" + std::to_string(line_no) + ": invalid key");
        }
        if (given(key)) continue;
        extra.push_back("--" + key + "=" + value);
    }
    std::vector<std::string> out{args.front()};
    out.insert(out.end(), extra.begin(), extra.end());
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monotone finite element solver for Hamilton-Jacobi-Bellman equations", "hjbfem"};
    app.require_subcommand(1);

    RunConfig solve_cfg;
    auto* solve = app.add_subcommand("solve", "Solve one benchmark on one mesh");
    add_run_options(solve, solve_cfg, false);

    RunConfig study_cfg;
    auto* study = app.add_subcommand("study", "Run a benchmark over successive refinements");
    add_run_options(study, study_cfg, true);

    auto* mesh = app.add_subcommand("mesh", "Mesh utilities");
    mesh->require_subcommand(1);
    std::string mesh_path;
    auto* info = mesh->add_subcommand("info", "Print mesh statistics");
    info->add_option("file", mesh_path, "Mesh file")->required();
    int refine_times = 1;
    std::string refine_out;
    auto* refine = mesh->add_subcommand("refine", "Write <name>.r<n>.mesh2");
    refine->add_option("file", mesh_path, "Mesh file")->required();
    refine->add_option("--times", refine_times, "Refinements")->check(CLI::Range(1, 12))->capture_default_str();
    refine->add_option("--out", refine_out, "Output directory (default: next to the input)");
    auto* check = mesh->add_subcommand("check-acute", "Exit 0 iff every angle is strictly below 90 degrees");
    check->add_option("file", mesh_path, "Mesh file")->required();
    std::string gen_kind;
    std::string gen_out;
    int gen_divisions = 3;
    int gen_rows = 10;
    auto* generate = mesh->add_subcommand("generate", "Write a built-in mesh");
    generate->add_option("kind", gen_kind, "triangle or lattice")
        ->required()
        ->check(CLI::IsMember({"triangle", "lattice"}));
    generate->add_option("--out", gen_out, "Target file")->required();
    generate->add_option("--divisions", gen_divisions, "Subdivisions per triangle side")
        ->check(CLI::Range(1, 4096))
        ->capture_default_str();
    generate->add_option("--side-rows", gen_rows, "Rows of the lattice domain")
        ->check(CLI::Range(4, 4096))
        ->capture_default_str();

    std::vector<std::string> argv_store{"hjbfem"};
    try {
        const auto expanded = expand_config(args);
        argv_store.insert(argv_store.end(), expanded.begin(), expanded.end());
    } catch (const InputError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    }
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_cfg, out);
        if (study->parsed()) return cmd_study(study_cfg, out);
        if (info->parsed()) return cmd_mesh_info(mesh_path, out);
        if (refine->parsed()) return cmd_mesh_refine(mesh_path, refine_times, refine_out, out);
        if (check->parsed()) return cmd_mesh_check(mesh_path, out);
        if (generate->parsed()) return cmd_mesh_generate(gen_kind, gen_divisions, gen_rows, gen_out, out);
    } catch (const MeshError& e) {
        err << "mesh error: " << e.what() << '\n';
        return kExitMesh;
    } catch (const UnfixableRowError& e) {
        err << "mesh error: " << e.what() << '\n';
        return kExitMesh;
    } catch (const InputError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const CflError& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    } catch (const ConvergenceError& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    } catch (const Error& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}

}  // namespace hjb
