// Command-line front end: solve | convergence | fields | weights-dump.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <clocale>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heatcq/heatcq.hpp"

namespace {

using namespace heatcq;

struct CommonFlags {
    std::string config;
    std::string out_override;
    int workers = 0;
    int contour_points = 0;
    bool dump_weights = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config,
                    "Path to a JSON run configuration, or a preset name "
                    "(paper-quad | horseshoe)")
        ->required();
    cmd->add_option("--out", flags.out_override, "Output directory (overrides the config)");
    cmd->add_option("--workers", flags.workers, "Worker threads (0 = hardware concurrency)");
    cmd->add_option("--contour-points", flags.contour_points,
                    "Override the number of CQ contour points");
    cmd->add_flag("--dump-weights", flags.dump_weights,
                  "Also write the CQ differentiation weights CSV");
}

[[nodiscard]] RunConfig resolve_config(const CommonFlags& flags) {
    RunConfig cfg = (flags.config == "paper-quad" || flags.config == "horseshoe")
                        ? preset_config(flags.config)
                        : load_config(flags.config);
    if (!flags.out_override.empty()) cfg.out_dir = flags.out_override;
    return cfg;
}

[[nodiscard]] std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[nodiscard]] std::filesystem::path prepare_out_dir(const RunConfig& cfg) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Builds the transmission problem described by the config: manufactured
// data, circle sources (demo), or zero data.
[[nodiscard]] TransmissionProblem problem_from_config(const RunConfig& cfg) {
    const Polygon poly = cfg.polygon();
    if (cfg.manufactured) {
        const ManufacturedSolution exact(cfg.x_sc, cfg.kappa / cfg.rho, cfg.t_lag, poly);
        return exact.problem(poly, cfg.kappa, cfg.rho, cfg.end_time);
    }
    if (cfg.sources.count > 0) {
        DemoParameters params;
        params.geometry = poly;
        params.kappa = cfg.kappa;
        params.rho = cfg.rho;
        params.num_sources = cfg.sources.count;
        params.source_center = cfg.sources.center;
        params.source_radius = cfg.sources.radius;
        params.t_lag = cfg.t_lag;
        params.end_time = cfg.end_time;
        return make_demo_problem(params);
    }
    return TransmissionProblem{poly, cfg.rho, cfg.kappa,
                               [](const Vec2&, const Vec2&, double) { return 0.0; },
                               [](const Vec2&, const Vec2&, double) { return 0.0; },
                               cfg.end_time};
}

void write_weights_csv(const std::filesystem::path& dir, const RunConfig& cfg,
                       const CommonFlags& flags) {
    const CQScheme scheme = CQScheme::parse(cfg.scheme, cfg.k, cfg.num_steps());
    const ContourParameters contour = ContourParameters::standard(scheme, flags.contour_points);
    const int count = std::min(scheme.num_steps(), contour.n_zeta - 1);
    const auto weights =
        cq_weights([](Complex s) { return s; }, scheme, contour, count);
    std::ofstream out(dir / "weights.csv");
    out << "n,row,col,re_omega,im_omega\n";
    for (int n = 0; n < static_cast<int>(weights.size()); ++n)
        for (int i = 0; i < weights[n].rows(); ++i)
            for (int j = 0; j < weights[n].cols(); ++j)
                out << n << ',' << i << ',' << j << ',' << fmt(weights[n](i, j).real()) << ','
                    << fmt(weights[n](i, j).imag()) << '\n';
}

int cmd_solve(const CommonFlags& flags) {
    const RunConfig cfg = resolve_config(flags);
    const auto dir = prepare_out_dir(cfg);
    const TransmissionProblem problem = problem_from_config(cfg);
    const BoundaryMesh mesh = mesh_polygon(problem.geometry, cfg.h);
    const TraceSpacePair spaces(mesh, cfg.degree);
    const CQScheme scheme = CQScheme::parse(cfg.scheme, cfg.k, cfg.num_steps());
    const ContourParameters contour = ContourParameters::standard(scheme, flags.contour_points);

    const DensityHistory densities =
        solve_transmission(problem, spaces, scheme, contour, flags.workers);
    const DiscreteNormOperators norms = build_norm_operators(spaces);

    std::ofstream out(dir / "densities.csv");
    out << "time,lambda_norm_hminushalf,phi_norm_hhalf\n";
    for (int j = 0; j < densities.node_count(); ++j) {
        const double nl = energy_norm<double>(norms.hminushalf, densities.lambda_node(j));
        const double np = energy_norm<double>(norms.hhalf, densities.phi_node(j));
        out << fmt(densities.node_time(j)) << ',' << fmt(nl) << ',' << fmt(np) << '\n';
    }
    if (flags.dump_weights) write_weights_csv(dir, cfg, flags);
    std::cout << "wrote " << (dir / "densities.csv").string() << " (" << densities.node_count()
              << " rows)\n";
    return 0;
}

int cmd_convergence(const CommonFlags& flags) {
    const RunConfig cfg = resolve_config(flags);
    if (cfg.levels < 3) throw ConfigError("levels: convergence study needs at least 3 levels");
    if (!cfg.manufactured)
        throw ConfigError("manufactured: convergence study requires manufactured data");
    const auto dir = prepare_out_dir(cfg);

    StudyConfig study;
    study.geometry = cfg.polygon();
    study.rho = cfg.rho;
    study.kappa = cfg.kappa;
    study.scheme = cfg.scheme;
    study.k0 = cfg.k;
    study.end_time = cfg.end_time;
    study.levels = cfg.levels;
    study.degree = cfg.degree;
    study.h0 = cfg.h;
    study.x_sc = cfg.x_sc;
    study.t_lag = cfg.t_lag;
    study.workers = flags.workers;
    study.contour_override = flags.contour_points;

    const ConvergenceRecord record = run_convergence_study(study);
    const ObservedRates rates = estimate_rates(record);

    std::ofstream out(dir / "convergence.csv");
    out << "level,k,h,E_phi,E_lambda_0,E_lambda_mhalf\n";
    for (const auto& lvl : record.levels)
        out << lvl.level << ',' << fmt(lvl.k) << ',' << fmt(lvl.h) << ','
            << fmt(lvl.errors.e_phi) << ',' << fmt(lvl.errors.e_lambda_0) << ','
            << fmt(lvl.errors.e_lambda_mhalf) << '\n';
    out << "rates,,," << fmt(rates.phi.rate) << ',' << fmt(rates.lambda_0.rate) << ','
        << fmt(rates.lambda_mhalf.rate) << '\n';
    if (flags.dump_weights) write_weights_csv(dir, cfg, flags);
    std::cout << "wrote " << (dir / "convergence.csv").string() << " (" << record.levels.size()
              << " levels)\n";
    return 0;
}

int cmd_fields(const CommonFlags& flags) {
    const RunConfig cfg = resolve_config(flags);
    const auto dir = prepare_out_dir(cfg);
    if (cfg.snapshot_times.empty()) {
        std::cout << "no snapshot times requested; nothing to do\n";
        return 0;
    }
    if (cfg.grid.nx <= 0 || cfg.grid.ny <= 0)
        throw ConfigError("grid: fields command needs a point grid");

    const Polygon poly = cfg.polygon();
    const std::vector<Vec2> raw_points = grid_points(cfg.grid);
    // Points numerically on Gamma cannot be evaluated; exclude and log them.
    std::vector<Vec2> points;
    std::vector<Vec2> excluded;
    const double tol = 1e-6 * poly.diameter();
    for (const Vec2& p : raw_points) {
        if (poly.distance_to_boundary(p) < tol)
            excluded.push_back(p);
        else
            points.push_back(p);
    }
    {
        std::ofstream log(dir / "fields_excluded.log");
        log << "excluded " << excluded.size() << " points within " << fmt(tol)
            << " of the boundary\n";
        for (const Vec2& p : excluded) log << fmt(p.x()) << ',' << fmt(p.y()) << '\n';
    }

    const int steps = cfg.num_steps();
    std::vector<int> indices;
    indices.reserve(cfg.snapshot_times.size());
    for (const double t : cfg.snapshot_times)
        indices.push_back(std::clamp(static_cast<int>(std::llround(t / cfg.k)), 0, steps));

    std::vector<FieldSnapshot> snaps;
    if (!cfg.manufactured && cfg.sources.count > 0) {
        DemoParameters params;
        params.geometry = poly;
        params.kappa = cfg.kappa;
        params.rho = cfg.rho;
        params.num_sources = cfg.sources.count;
        params.source_center = cfg.sources.center;
        params.source_radius = cfg.sources.radius;
        params.t_lag = cfg.t_lag;
        params.scheme = cfg.scheme;
        params.step_size = cfg.k;
        params.end_time = cfg.end_time;
        params.degree = cfg.degree;
        params.mesh_h = cfg.h;
        params.snapshot_times = cfg.snapshot_times;
        snaps = run_demo_simulation(params, points, flags.workers, flags.contour_points);
    } else {
        const TransmissionProblem problem = problem_from_config(cfg);
        const BoundaryMesh mesh = mesh_polygon(poly, cfg.h);
        const TraceSpacePair spaces(mesh, cfg.degree);
        const CQScheme scheme = CQScheme::parse(cfg.scheme, cfg.k, steps);
        const ContourParameters contour =
            ContourParameters::standard(scheme, flags.contour_points);
        const DensityHistory densities =
            solve_transmission(problem, spaces, scheme, contour, flags.workers);
        snaps = evaluate_fields(densities, problem, spaces, points, indices, contour,
                                flags.workers);
    }

    for (const FieldSnapshot& snap : snaps) {
        char name[64];
        std::snprintf(name, sizeof(name), "fields_t%.6g.csv", snap.time);
        std::ofstream out(dir / name);
        out << "x,y,region,u_value\n";
        for (size_t p = 0; p < snap.points.size(); ++p)
            out << fmt(snap.points[p].x()) << ',' << fmt(snap.points[p].y()) << ','
                << (snap.region[p] < 0 ? '-' : '+') << ',' << fmt(snap.u(p)) << '\n';
    }
    if (flags.dump_weights) write_weights_csv(dir, cfg, flags);
    std::cout << "wrote " << snaps.size() << " snapshot files to " << dir.string() << '\n';
    return 0;
}

int cmd_weights_dump(const CommonFlags& flags) {
    const RunConfig cfg = resolve_config(flags);
    const auto dir = prepare_out_dir(cfg);
    write_weights_csv(dir, cfg, flags);
    std::cout << "wrote " << (dir / "weights.csv").string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_NUMERIC, "C");
    CLI::App app{"Transient heat-transmission CQ-BEM solver"};
    app.require_subcommand(1);

    CommonFlags solve_flags, conv_flags, fields_flags, weights_flags;
    CLI::App* solve = app.add_subcommand("solve", "Run one transmission solve");
    add_common(solve, solve_flags);
    CLI::App* conv = app.add_subcommand("convergence", "Run a manufactured convergence study");
    add_common(conv, conv_flags);
    CLI::App* fields = app.add_subcommand("fields", "Evaluate field snapshots on a grid");
    add_common(fields, fields_flags);
    CLI::App* weights = app.add_subcommand("weights-dump", "Write the CQ weights CSV");
    add_common(weights, weights_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_flags);
        if (conv->parsed()) return cmd_convergence(conv_flags);
        if (fields->parsed()) return cmd_fields(fields_flags);
        if (weights->parsed()) return cmd_weights_dump(weights_flags);
        std::cerr << "error: no command given\n";
        return 2;
    } catch (const heatcq::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const heatcq::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
}
