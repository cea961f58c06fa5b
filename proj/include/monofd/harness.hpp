#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "monofd/disc_mesh.hpp"
#include "monofd/envelope.hpp"
#include "monofd/hessian.hpp"
#include "monofd/meshio.hpp"
#include "monofd/pde.hpp"
#include "monofd/solvers.hpp"
#include "monofd/stencil.hpp"

namespace monofd {

enum class SchemeChoice { interp, nn };
enum class SolverChoice { euler, newton, combo };

/// A 2-D cloud together with its stencils and Hessian operator. The operator
/// refers to the cloud and stencils, so instances are kept behind a pointer.
struct Discretization {
    PointCloud<2> cloud;
    StencilSet<2> stencils;
    std::unique_ptr<HessianOperator<2>> op;
    ConvexPolygon domain;

    Discretization() = default;
    Discretization(const Discretization&) = delete;
    Discretization& operator=(const Discretization&) = delete;
};

/// Regular grid on [-1,1]^2 with `side` points per axis, optionally rotated about the origin.
inline std::unique_ptr<Discretization> discretize_grid(int side, int rho, SchemeChoice scheme, double angle = 0.0) {
    auto d = std::make_unique<Discretization>();
    d->cloud = build_regular_grid<2>(side, Vec<2>(-1.0, -1.0), Vec<2>(1.0, 1.0), rho);
    d->domain = ConvexPolygon::box(Vec<2>(-1.0, -1.0), Vec<2>(1.0, 1.0));
    if (angle != 0.0) {
        d->cloud = rotate_cloud(d->cloud, angle);
        d->domain = d->domain.rotated(angle);
    }
    if (scheme == SchemeChoice::interp) {
        d->stencils = preprocess_grid(d->cloud, rho);
        d->op = std::make_unique<SectorOperator>(d->cloud, d->stencils);
    } else {
        d->op = std::make_unique<RowOperator<2>>(make_lattice_operator(d->cloud, rho));
    }
    return d;
}

/// Unstructured cloud with stencils for angular resolution dtheta.
inline std::unique_ptr<Discretization> discretize_cloud(PointCloud<2> cloud, double dtheta) {
    auto d = std::make_unique<Discretization>();
    d->cloud = std::move(cloud);
    d->domain = ConvexPolygon::hull(d->cloud.points());
    d->stencils = preprocess_cloud(d->cloud, dtheta);
    d->op = std::make_unique<SectorOperator>(d->cloud, d->stencils);
    return d;
}

struct ProblemSetup {
    ProblemKind kind = ProblemKind::pucci;
    double alpha = 2.0;
    Vec<2> p1{-3.0 / 7.0, 0.0};
    Vec<2> p2{3.0 / 7.0, 0.0};
};

/// Point data: the double cone for the envelope, the exact solution for Pucci.
inline EllipticProblem make_problem(const ProblemSetup& setup, const PointCloud<2>& cloud) {
    EllipticProblem p{setup.kind, setup.alpha, std::vector<double>(cloud.size())};
    for (int i = 0; i < cloud.size(); ++i) {
        const Vec<2>& x = cloud.point(i);
        p.g[i] = setup.kind == ProblemKind::convex_envelope ? double_cone<2>(x, setup.p1, setup.p2) : pucci_exact<2>(x, setup.alpha);
    }
    return p;
}

/// Exact solution at every point of the discretization.
inline std::vector<double> exact_solution(const ProblemSetup& setup, const Discretization& d) {
    std::vector<double> u(d.cloud.size());
    for (int i = 0; i < d.cloud.size(); ++i) {
        const Vec<2>& x = d.cloud.point(i);
        u[i] = setup.kind == ProblemKind::convex_envelope ? two_cone_envelope(x, setup.p1, setup.p2, d.domain)
                                                          : pucci_exact<2>(x, setup.alpha);
    }
    return u;
}

inline SolveResult run_solver(SolverChoice solver, const NonlinearSystem& sys, std::vector<double> u0, const SolverConfig& cfg) {
    switch (solver) {
        case SolverChoice::euler: return euler_solve(sys, std::move(u0), cfg);
        case SolverChoice::newton: return newton_solve(sys, std::move(u0), cfg);
        case SolverChoice::combo: break;
    }
    return combination_solve(sys, std::move(u0), cfg);
}

struct SolveOutcome {
    std::vector<double> u;
    SolverReport report;
    double error = 0.0;  ///< max-norm error at interior points
};

inline double interior_error(const PointCloud<2>& cloud, const std::vector<double>& u, const std::vector<double>& exact) {
    double e = 0.0;
    for (int i : cloud.interior_points()) e = std::max(e, std::abs(u[i] - exact[i]));
    return e;
}

inline SolveOutcome solve_problem(const ProblemSetup& setup, const Discretization& d, SolverChoice solver, const SolverConfig& cfg) {
    DiscreteProblem<2> sys(d.cloud, *d.op, make_problem(setup, d.cloud));
    auto res = run_solver(solver, sys, sys.initial_guess(), cfg);
    SolveOutcome out{std::move(res.u), std::move(res.report), 0.0};
    out.error = interior_error(d.cloud, out.u, exact_solution(setup, d));
    return out;
}

/// Observed order between two levels.
inline double observed_rate(double h0, double e0, double h1, double e1) {
    return std::log(e0 / e1) / std::log(h0 / h1);
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += std::log(x[k]);
        my += std::log(y[k]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = std::log(x[k]) - mx;
        sxy += dx * (std::log(y[k]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

struct ConvergenceRow {
    double h = 0.0;
    int N = 0;
    double error = 0.0;
    double rate = std::numeric_limits<double>::quiet_NaN();
    bool failed = false;
    std::string message;
};

/// Solves on each discretization produced by `levels` and records errors and rates.
/// A failed level is reported and skipped when computing the next rate.
inline std::vector<ConvergenceRow> convergence_sweep(const ProblemSetup& setup, int count,
                                                     const std::function<std::unique_ptr<Discretization>(int)>& level,
                                                     SolverChoice solver, const SolverConfig& cfg) {
    std::vector<ConvergenceRow> rows;
    const ConvergenceRow* prev = nullptr;
    for (int k = 0; k < count; ++k) {
        ConvergenceRow row;
        try {
            const auto d = level(k);
            row.h = d->cloud.metrics().h;
            row.N = d->cloud.size();
            row.error = solve_problem(setup, *d, solver, cfg).error;
            if (prev) row.rate = observed_rate(prev->h, prev->error, row.h, row.error);
        } catch (const std::exception& e) {
            row.failed = true;
            row.message = e.what();
        }
        rows.push_back(row);
        prev = rows.back().failed ? nullptr : &rows.back();
    }
    return rows;
}

inline std::string format_value(double v) {
    if (std::isnan(v)) return "";
    return detail::format_double(v);
}

inline void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
    os << "h,N,error,rate\n";
    for (const auto& r : rows) {
        if (r.failed) {
            os << format_value(r.h) << "," << r.N << ",FAILED,\n";
            continue;
        }
        os << format_value(r.h) << "," << r.N << "," << format_value(r.error) << "," << format_value(r.rate) << "\n";
    }
}

/// Grid sides matching a list of point counts.
inline std::vector<int> sides_for_counts(const std::vector<int>& counts) {
    std::vector<int> sides;
    for (int n : counts) sides.push_back(static_cast<int>(std::lround(std::sqrt(static_cast<double>(n)))));
    return sides;
}

/// Angular resolution used for unstructured clouds when none is given.
inline double default_dtheta(double h) { return std::clamp(1.6 * std::cbrt(h), 0.2, 1.2); }

struct RotationRow {
    double angle = 0.0;
    double error = 0.0;
    bool failed = false;
};

struct Summary {
    double mean = 0.0;
    double variance = 0.0;
};

inline Summary summarize(const std::vector<RotationRow>& rows) {
    Summary s;
    int n = 0;
    for (const auto& r : rows)
        if (!r.failed) {
            s.mean += r.error;
            ++n;
        }
    if (n == 0) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    s.mean /= n;
    for (const auto& r : rows)
        if (!r.failed) s.variance += (r.error - s.mean) * (r.error - s.mean);
    s.variance /= n;
    return s;
}

inline std::vector<RotationRow> rotation_study(const ProblemSetup& setup, int side, int rho, SchemeChoice scheme,
                                               const std::vector<double>& angles, SolverChoice solver, const SolverConfig& cfg) {
    std::vector<RotationRow> rows;
    for (double a : angles) {
        RotationRow row{a, 0.0, false};
        try {
            const auto d = discretize_grid(side, rho, scheme, a);
            row.error = solve_problem(setup, *d, solver, cfg).error;
        } catch (const std::exception&) {
            row.failed = true;
        }
        rows.push_back(row);
    }
    return rows;
}

struct BenchRow {
    SolverChoice solver = SolverChoice::combo;
    int N = 0;
    double seconds = 0.0;
    int iterations = 0;
    bool failed = false;
    std::vector<double> u;
};

inline const char* solver_name(SolverChoice s) {
    switch (s) {
        case SolverChoice::euler: return "euler";
        case SolverChoice::newton: return "newton";
        case SolverChoice::combo: break;
    }
    return "combo";
}

inline std::vector<BenchRow> bench_solvers(const ProblemSetup& setup, const std::vector<int>& sides, int rho, SchemeChoice scheme,
                                           const std::vector<SolverChoice>& solvers, const SolverConfig& cfg) {
    std::vector<BenchRow> rows;
    for (int side : sides) {
        const auto d = discretize_grid(side, rho, scheme);
        DiscreteProblem<2> sys(d->cloud, *d->op, make_problem(setup, d->cloud));
        for (SolverChoice s : solvers) {
            BenchRow row;
            row.solver = s;
            row.N = d->cloud.size();
            try {
                auto res = run_solver(s, sys, sys.initial_guess(), cfg);
                row.seconds = res.report.total_seconds;
                row.iterations = res.report.iterations;
                row.u = std::move(res.u);
            } catch (const NonConverged& e) {
                row.failed = true;
                row.seconds = e.report().total_seconds;
                row.iterations = e.report().iterations;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

/// Fitted log-log slope of seconds against N for one solver (failed rows skipped).
inline double bench_slope(const std::vector<BenchRow>& rows, SolverChoice s) {
    std::vector<double> n, t;
    for (const auto& r : rows)
        if (r.solver == s && !r.failed) {
            n.push_back(r.N);
            t.push_back(r.seconds);
        }
    return loglog_slope(n, t);
}

}  // namespace monofd
