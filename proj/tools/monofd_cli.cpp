#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>

#include "monofd/harness.hpp"

using namespace monofd;

namespace {

constexpr int kOk = 0;
constexpr int kSolverFailure = 1;
constexpr int kConfigError = 2;

struct Options {
    std::string problem = "pucci";
    double alpha = 2.0;
    std::string scheme = "interp";
    int radius = 3;
    std::optional<double> dtheta;
    std::vector<std::string> meshes;
    std::vector<int> grid_n;
    std::vector<int> disc_n;
    std::vector<std::string> solvers;
    double tol = 1e-8;
    bool deterministic = false;
    std::optional<int> max_iters;
    std::string out;
    std::vector<double> angles;
    int angle_count = 16;
};

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

const std::map<std::string, ProblemKind> kProblems{{"ce", ProblemKind::convex_envelope}, {"pucci", ProblemKind::pucci}};
const std::map<std::string, SchemeChoice> kSchemes{{"interp", SchemeChoice::interp}, {"nn", SchemeChoice::nn}};
const std::map<std::string, SolverChoice> kSolvers{
    {"euler", SolverChoice::euler}, {"newton", SolverChoice::newton}, {"combo", SolverChoice::combo}};

void add_common(CLI::App* app, Options& o) {
    app->add_option("--problem", o.problem, "ce (convex envelope of a double cone) or pucci")
        ->check(CLI::IsMember({"ce", "pucci"}))
        ->capture_default_str();
    app->add_option("--alpha", o.alpha, "Pucci ellipticity constant")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--scheme", o.scheme, "interp (barycentric stencils) or nn (nearest lattice direction)")
        ->check(CLI::IsMember({"interp", "nn"}))
        ->capture_default_str();
    app->add_option("--radius", o.radius, "stencil radius in grid spacings (regular grids)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--dtheta", o.dtheta, "angular resolution for meshes (default 1.6*h^(1/3), clamped to [0.2,1.2])");
    app->add_option("--tol", o.tol, "solver tolerance on max|F|")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--max-iters", o.max_iters, "iteration budget for Euler and for Newton steps (default 5000000 and 200)")
        ->check(CLI::NonNegativeNumber);
    app->add_flag("--deterministic", o.deterministic, "iteration budgets instead of wall-clock matching in the combined solver");
    app->add_option("--out", o.out, "output file (default: standard output)");
}

ProblemSetup setup_from(const Options& o) {
    ProblemSetup s;
    s.kind = kProblems.at(o.problem);
    s.alpha = o.alpha;
    return s;
}

SolverConfig config_from(const Options& o) {
    SolverConfig c;
    c.tol = o.tol;
    c.deterministic = o.deterministic;
    if (o.max_iters) c.max_iters = c.max_newton_iters = *o.max_iters;
    return c;
}

SolverChoice single_solver(const Options& o) {
    if (o.solvers.empty()) return SolverChoice::combo;
    if (o.solvers.size() > 1) throw ConfigError("this command takes a single --solver");
    return kSolvers.at(o.solvers.front());
}

std::unique_ptr<Discretization> cloud_level(PointCloud<2> cloud, const Options& o) {
    const double dtheta = o.dtheta ? *o.dtheta : default_dtheta(cloud.metrics().h);
    return discretize_cloud(std::move(cloud), dtheta);
}

// Writes to --out or stdout.
template <class F>
void emit(const Options& o, F&& write) {
    if (o.out.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream os(o.out);
    if (!os) throw ConfigError("cannot open " + o.out + " for writing");
    write(os);
}

int cmd_converge(const Options& o) {
    const SchemeChoice scheme = kSchemes.at(o.scheme);
    const int sources = !o.meshes.empty() + !o.grid_n.empty() + !o.disc_n.empty();
    if (sources > 1) throw ConfigError("give only one of --mesh, --grid-n, --disc-n");
    if (scheme == SchemeChoice::nn && (!o.meshes.empty() || !o.disc_n.empty()))
        throw ConfigError("the nn scheme needs a regular grid");
    std::vector<PointCloud<2>> meshes;
    for (const auto& path : o.meshes) meshes.push_back(read_mesh<2>(path));

    std::function<std::unique_ptr<Discretization>(int)> level;
    int count = 0;
    std::vector<int> sides = o.grid_n;
    if (!o.meshes.empty()) {
        count = static_cast<int>(meshes.size());
        level = [&](int k) { return cloud_level(meshes[k], o); };
    } else if (!o.disc_n.empty()) {
        count = static_cast<int>(o.disc_n.size());
        level = [&](int k) {
            DiscMeshOptions opt;
            opt.target_points = o.disc_n[k];
            return cloud_level(make_disc_mesh(opt), o);
        };
    } else {
        if (sides.empty()) sides = sides_for_counts({392, 721, 1288, 2492, 4616, 9017});
        count = static_cast<int>(sides.size());
        level = [&](int k) { return discretize_grid(sides[k], o.radius, scheme); };
    }
    const auto rows = convergence_sweep(setup_from(o), count, level, single_solver(o), config_from(o));
    emit(o, [&](std::ostream& os) { write_convergence_csv(os, rows); });
    for (const auto& r : rows)
        if (r.failed) {
            std::cerr << "level N=" << r.N << ": " << r.message << "\n";
            return kSolverFailure;
        }
    return kOk;
}

int cmd_rotate(const Options& o) {
    if (o.grid_n.size() > 1) throw ConfigError("rotate takes a single --grid-n");
    const int side = o.grid_n.empty() ? 41 : o.grid_n.front();
    std::vector<double> angles = o.angles;
    if (angles.empty())
        for (int k = 0; k < o.angle_count; ++k) angles.push_back(0.5 * std::numbers::pi * k / o.angle_count);
    const auto rows = rotation_study(setup_from(o), side, o.radius, kSchemes.at(o.scheme), angles, single_solver(o), config_from(o));
    const Summary s = summarize(rows);
    bool failed = false;
    emit(o, [&](std::ostream& os) {
        os << "angle,error\n";
        for (const auto& r : rows) {
            os << format_value(r.angle) << "," << (r.failed ? "FAILED" : format_value(r.error)) << "\n";
            failed = failed || r.failed;
        }
        os << "mean," << format_value(s.mean) << "\n";
        os << "variance," << format_value(s.variance) << "\n";
    });
    return failed ? kSolverFailure : kOk;
}

int cmd_bench(const Options& o) {
    std::vector<SolverChoice> solvers;
    for (const auto& s : o.solvers) solvers.push_back(kSolvers.at(s));
    if (solvers.empty()) solvers = {SolverChoice::euler, SolverChoice::newton, SolverChoice::combo};
    const std::vector<int> sides = o.grid_n.empty() ? sides_for_counts({392, 721, 1288, 2492, 4616, 9017}) : o.grid_n;
    const auto rows = bench_solvers(setup_from(o), sides, o.radius, kSchemes.at(o.scheme), solvers, config_from(o));
    bool failed = false;
    emit(o, [&](std::ostream& os) {
        os << "solver,N,seconds,iterations\n";
        for (const auto& r : rows) {
            os << solver_name(r.solver) << "," << r.N << "," << (r.failed ? "FAILED" : format_value(r.seconds)) << ","
               << r.iterations << "\n";
            failed = failed || r.failed;
        }
        if (sides.size() > 1)
            for (SolverChoice s : solvers) os << "slope," << solver_name(s) << "," << format_value(bench_slope(rows, s)) << ",\n";
    });
    return failed ? kSolverFailure : kOk;
}

int cmd_validate(const Options& o) {
    if (o.meshes.size() + o.grid_n.size() != 1) throw ConfigError("validate takes one --mesh or one --grid-n");
    PointCloud<2> cloud = o.meshes.empty() ? build_regular_grid<2>(o.grid_n.front(), Vec<2>(-1.0, -1.0), Vec<2>(1.0, 1.0), o.radius)
                                           : read_mesh<2>(o.meshes.front());
    const double dtheta = o.dtheta ? *o.dtheta : default_dtheta(cloud.metrics().h);
    const SearchParams params = search_radii(cloud.metrics().h, dtheta, 2);
    const ResolutionReport rep = validate_resolution(cloud, params);
    emit(o, [&](std::ostream& os) {
        os << "points," << cloud.size() << "\n";
        os << "h," << format_value(cloud.metrics().h) << "\n";
        os << "h_boundary," << format_value(cloud.metrics().h_boundary) << "\n";
        os << "delta," << format_value(cloud.metrics().delta) << "\n";
        os << "dtheta," << format_value(dtheta) << "\n";
        os << "r," << format_value(params.r) << "\n";
        os << "R," << format_value(params.R) << "\n";
        os << "boundary_lhs," << format_value(rep.lhs_boundary) << "\n";
        os << "boundary_rhs," << format_value(rep.rhs_boundary) << "\n";
        os << "boundary_ok," << rep.boundary_ok << "\n";
        os << "delta_le_r," << rep.delta_le_r << "\n";
        os << "delta_ge_r," << rep.delta_ge_r << "\n";
        os << "checked_points," << rep.checked_points << "\n";
        os << "sampled_directions," << rep.sampled_directions << "\n";
        os << "failing_points," << rep.failing_points.size() << "\n";
        for (int i : rep.failing_points) os << "failing," << i << "\n";
        os << "passed," << rep.passed() << "\n";
    });
    return rep.passed() ? kOk : kSolverFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monotone finite-difference solvers for degenerate elliptic equations on grids and point clouds"};
    app.require_subcommand(1);
    Options o;

    auto* converge = app.add_subcommand("converge", "convergence sweep; CSV columns h,N,error,rate");
    add_common(converge, o);
    converge->add_option("--mesh", o.meshes, "mesh files, coarse to fine")->check(CLI::ExistingFile);
    converge->add_option("--grid-n", o.grid_n, "grid points per side, one per level (default from N = 392..9017)");
    converge->add_option("--disc-n", o.disc_n, "generate disc meshes with these point counts");
    converge->add_option("--solver", o.solvers, "euler, newton or combo (default combo)")->check(CLI::IsMember({"euler", "newton", "combo"}));

    auto* rotate = app.add_subcommand("rotate", "error against grid rotation; CSV columns angle,error plus mean and variance");
    add_common(rotate, o);
    rotate->add_option("--grid-n", o.grid_n, "grid points per side (default 41)");
    rotate->add_option("--angles", o.angles, "rotation angles in radians");
    rotate->add_option("--angle-count", o.angle_count, "equally spaced angles in [0, pi/2) when --angles is absent")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    rotate->add_option("--solver", o.solvers, "euler, newton or combo (default combo)")->check(CLI::IsMember({"euler", "newton", "combo"}));

    auto* bench = app.add_subcommand("bench", "solver timings; CSV columns solver,N,seconds,iterations plus fitted slopes");
    add_common(bench, o);
    bench->add_option("--grid-n", o.grid_n, "grid points per side (default from N = 392..9017)");
    bench->add_option("--solver", o.solvers, "solvers to time (default all)")->check(CLI::IsMember({"euler", "newton", "combo"}));

    auto* validate = app.add_subcommand("validate", "stencil resolution diagnostics; exit 0 iff all checks pass");
    add_common(validate, o);
    validate->add_option("--mesh", o.meshes, "mesh file")->check(CLI::ExistingFile);
    validate->add_option("--grid-n", o.grid_n, "regular grid on [-1,1]^2 with this many points per side");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (*converge) return cmd_converge(o);
        if (*rotate) return cmd_rotate(o);
        if (*bench) return cmd_bench(o);
        return cmd_validate(o);
    } catch (const NonConverged& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSolverFailure;
    } catch (const LinearSolveFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSolverFailure;
    } catch (const std::exception& e) {
        // Mesh parse and topology errors, bad options, unreadable files.
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
}
