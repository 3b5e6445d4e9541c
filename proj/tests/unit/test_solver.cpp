#include <doctest.h>

#include <cmath>
#include <limits>

#include "fracdiff/analysis_harness.hpp"
#include "fracdiff/cauchy_solver.hpp"
#include "fracdiff/error.hpp"
#include "fracdiff/special_functions.hpp"

using namespace fracdiff;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Field mode_field(const SpatialGrid& g, int k, double amplitude = 1.0) {
    const double xi = g.wavenumber(k);
    return Field::sample(g, [&](const auto& x) { return amplitude * std::cos(xi * x[0]); });
}

Field gaussian(const SpatialGrid& g, double amplitude, double width) {
    Profile p;
    p.amplitude = amplitude;
    p.width = width;
    return make_profile(p, g);
}

double max_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

CauchyProblem linear(const Field& u0, const Field& u1, double alpha = 0.5) {
    CauchyProblem p;
    p.alpha = FractionalOrder(alpha);
    p.u0 = u0;
    p.u1 = u1;
    return p;
}

}  // namespace

TEST_CASE("schedule snaps to nodes") {
    const TimeStepping s = make_schedule(0.1, 2.0, {0.0, 0.3, 1.0, 2.0});
    CHECK(s.grid.n_steps == 20);
    const auto t = s.output_times();
    REQUIRE(t.size() == 4);
    CHECK(t[0] == 0.0);
    CHECK(t[1] == doctest::Approx(0.3));
    CHECK(t[2] == doctest::Approx(1.0));
    CHECK(t[3] == doctest::Approx(2.0));
    CHECK_THROWS_AS(make_schedule(0.1, 2.0, {5.0}), Error);
    const auto ls = log_spaced(10.0, 100.0, 3);
    CHECK(ls[1] == doctest::Approx(std::sqrt(1000.0)));
}

TEST_CASE("single mode is exact") {
    const SpatialGrid g(1, 64, 8.0);
    const int k = 3;
    const double xi2 = std::pow(g.wavenumber(k), 2);
    const Field u0 = mode_field(g, k);
    const TimeStepping s = make_schedule(0.05, 3.0, {0.5, 1.0, 3.0});
    const Trajectory tr = solve_linear(linear(u0, Field(g)), s);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const double t = tr.times[i];
        const double m = eval_ml(1.5, 1.0, std::pow(t, 1.5) * xi2);
        Field expect = u0;
        for (double& v : expect.values) v *= m;
        CHECK(max_diff(tr.snapshots[i], expect) <= 1e-9 * std::max(std::abs(m), 1e-3));
    }
}

TEST_CASE("initial conditions are recovered") {
    const SpatialGrid g(1, 128, 16.0);
    const Field u0 = gaussian(g, 1.0, 2.0);
    const Trajectory a = solve_linear(linear(u0, Field(g)), make_schedule(1e-6, 1e-6, {1e-6}));
    CHECK(max_diff(a.snapshots[0], u0) <= 1e-8);

    const Field u1 = gaussian(g, 1.0, 2.0);
    const double t = 1e-4;
    const Trajectory b = solve_linear(linear(Field(g), u1), make_schedule(t, t, {t}));
    Field scaled = b.snapshots[0];
    for (double& v : scaled.values) v /= t;
    CHECK(max_diff(scaled, u1) <= 1e-5);

    const Trajectory z = solve_linear(linear(Field(g), Field(g)), make_schedule(0.1, 2.0, {1.0, 2.0}));
    for (const auto& f : z.snapshots) CHECK(lq_norm(f, kInf) == 0.0);
}

TEST_CASE("linearity in the data and forcing") {
    const SpatialGrid g(1, 128, 16.0);
    const Field u0 = gaussian(g, 1.0, 2.0);
    const Field u1 = mode_field(g, 2, 0.3);
    const Field shape = gaussian(g, 0.5, 3.0);
    auto forced = [&](const Field& a, const Field& b, double scale) {
        CauchyProblem p = linear(a, b);
        p.forcing = ForcingKind::Fixed;
        p.source = [shape, scale](double t) {
            Field f = shape;
            for (double& v : f.values) v *= scale * std::exp(-t);
            return f;
        };
        return solve_linear(p, make_schedule(0.05, 2.0, {1.0, 2.0}));
    };
    const Trajectory x = forced(u0, Field(g), 1.0);
    const Trajectory y = forced(Field(g), u1, 2.0);
    const Trajectory xy = forced(u0, u1, 3.0);
    for (std::size_t i = 0; i < xy.times.size(); ++i) {
        Field sum = x.snapshots[i];
        for (std::size_t j = 0; j < sum.values.size(); ++j) sum.values[j] += y.snapshots[i].values[j];
        CHECK(max_diff(sum, xy.snapshots[i]) <= 1e-12);
    }
}

TEST_CASE("forced mode obeys the scalar equation") {
    // Per mode, u solves the scalar problem d^{1+a} u + xi^2 u = f; compare with the
    // ODE solution built by the fractional-calculus module.
    const SpatialGrid g(1, 64, 8.0);
    const int k = 2;
    const double xi2 = std::pow(g.wavenumber(k), 2);
    const Field mode = mode_field(g, k);
    CauchyProblem p = linear(Field(g), Field(g));
    p.forcing = ForcingKind::Fixed;
    p.source = [mode](double t) {
        Field f = mode;
        for (double& v : f.values) v *= std::cos(t);
        return f;
    };
    const double h = 1e-2;
    const Trajectory tr = solve_linear(p, make_schedule(h, 2.0, {2.0}));
    const TimeSeries f = TimeSeries::sample(TimeGrid(h, 200), [](double t) { return std::cos(t); });
    const TimeSeries g_ode = ode_solution(FractionalOrder(0.5), -xi2, 0.0, 0.0, f);
    CHECK(tr.snapshots[0].values[32] == doctest::Approx(g_ode.values[200]).epsilon(1e-8));
}

TEST_CASE("u_t reconstruction") {
    const SpatialGrid g(1, 64, 8.0);
    const Field u0 = mode_field(g, 3);
    const double h = 1e-3;
    const double t = 1.2;
    const Trajectory ut = reconstruct_ut(linear(u0, Field(g)), make_schedule(0.01, t, {t}));
    const Trajectory u = solve_linear(linear(u0, Field(g)), make_schedule(h, t + h, {t - h, t + h}));
    Field fd = u.snapshots[1];
    for (std::size_t i = 0; i < fd.values.size(); ++i) {
        fd.values[i] = (u.snapshots[1].values[i] - u.snapshots[0].values[i]) / (2 * h);
    }
    CHECK(max_diff(ut.snapshots[0], fd) <= 1e-4);

    const Field u1 = gaussian(g, 1.0, 1.5);
    const Trajectory early = reconstruct_ut(linear(Field(g), u1), make_schedule(1e-6, 1e-6, {1e-6}));
    CHECK(max_diff(early.snapshots[0], u1) <= 1e-6);

    const Trajectory zero = reconstruct_ut(linear(Field(g), Field(g)), make_schedule(0.1, 1.0, {1.0}));
    CHECK(lq_norm(zero.snapshots[0], kInf) == 0.0);
}

TEST_CASE("Riemann-Liouville data") {
    const SpatialGrid g(1, 64, 8.0);
    const int k = 2;
    const double xi2 = std::pow(g.wavenumber(k), 2);
    RLProblem p;
    p.alpha = FractionalOrder(0.5);
    p.v = Field(g);
    p.u_alpha = mode_field(g, k);
    const Trajectory tr = solve_rl_problem(p, make_schedule(0.05, 2.0, {0.5, 2.0}));
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const double t = tr.times[i];
        const double m = std::pow(t, 0.5) * eval_ml(1.5, 1.5, std::pow(t, 1.5) * xi2);
        CHECK(tr.snapshots[i].values[32] == doctest::Approx(m).epsilon(1e-9));
    }
    p.u_alpha = Field(g);
    const Trajectory zero = solve_rl_problem(p, make_schedule(0.05, 1.0, {0.0, 1.0}));
    for (const auto& f : zero.snapshots) CHECK(lq_norm(f, kInf) == 0.0);

    p.v = mode_field(g, k);
    CHECK_THROWS_AS(solve_rl_problem(p, make_schedule(0.05, 1.0, {0.0, 1.0})), Error);
    const Trajectory near0 = solve_rl_problem(p, make_schedule(1e-6, 1e-6, {1e-6}));
    const double scaled = near0.snapshots[0].values[32] * std::pow(1e-6, 0.5);
    CHECK(scaled == doctest::Approx(1.0 / std::tgamma(0.5)).epsilon(1e-4));
}

TEST_CASE("semilinear: zero is a fixed point") {
    const SpatialGrid g(1, 64, 8.0);
    CauchyProblem p = linear(Field(g), Field(g));
    p.forcing = ForcingKind::Semilinear;
    p.power = 3.0;
    const Trajectory tr = solve_semilinear(p, make_schedule(0.1, 5.0, {1.0, 5.0}));
    CHECK(tr.status == SolveStatus::Completed);
    for (const auto& f : tr.snapshots) CHECK(lq_norm(f, kInf) == 0.0);
}

TEST_CASE("semilinear agrees with the first Picard iterate for small data") {
    const SpatialGrid g(1, 128, 32.0);
    const double eps = 1e-2;
    const double p_exp = 3.0;
    const Field u0 = gaussian(g, eps, 2.0);
    const TimeStepping s = make_schedule(0.02, 2.0, {0.5, 1.0, 2.0});

    CauchyProblem semi = linear(u0, Field(g));
    semi.forcing = ForcingKind::Semilinear;
    semi.power = p_exp;
    SemilinearOptions opts;
    opts.picard_sweeps = 2;
    const Trajectory nl = solve_semilinear(semi, s, opts);
    REQUIRE(nl.status == SolveStatus::Completed);

    // u_lin sampled on the quadrature grid, then |u_lin|^p as a fixed forcing.
    const TimeStepping fine = make_schedule(0.02, 2.0, s.grid.times());
    const Trajectory lin = solve_linear(linear(u0, Field(g)), fine);
    CauchyProblem first = linear(u0, Field(g));
    first.forcing = ForcingKind::Fixed;
    first.source = [&lin, p_exp](double t) {
        const auto i = static_cast<std::size_t>(std::lround(t / 0.02));
        Field f = lin.snapshots[i];
        for (double& v : f.values) v = std::pow(std::abs(v), p_exp);
        return f;
    };
    const Trajectory pic = solve_linear(first, s);
    for (std::size_t i = 0; i < s.output_nodes.size(); ++i) {
        // The remaining gap is second order in eps^p.
        CHECK(max_diff(nl.snapshots[i], pic.snapshots[i]) <= 1e-3 * std::pow(eps, p_exp));
        CHECK(lq_norm(nl.nonlinear[i], kInf) > 0.0);
    }
}

TEST_CASE("semilinear blow-up is reported") {
    const SpatialGrid g(1, 128, 32.0);
    Profile bump;
    bump.shape = "bump";
    bump.amplitude = 20.0;
    bump.width = 4.0;
    CauchyProblem p = linear(make_profile(bump, g), Field(g));
    p.forcing = ForcingKind::Semilinear;
    p.power = 2.0;
    const Trajectory tr = solve_semilinear(p, make_schedule(0.01, 5.0, {1.0, 5.0}));
    CHECK(tr.status == SolveStatus::Blowup);
    CHECK(tr.blowup_time > 0.0);
    CHECK(tr.blowup_time < 5.0);
}

TEST_CASE("well-posedness ratio is bounded across data") {
    // ||u(t)||_q / (||u0||_q + t ||u1||_q + K) over a small matrix of data and times.
    const SpatialGrid g(1, 256, 32.0);
    double lo = kInf, hi = 0.0;
    for (double w : {1.0, 2.0, 4.0}) {
        for (double q : {1.0, 2.0, kInf}) {
            const Field u0 = gaussian(g, 1.0, w);
            const Field u1 = gaussian(g, 0.5, w);
            const Field f0 = gaussian(g, 0.2, w);
            CauchyProblem p = linear(u0, u1);
            p.forcing = ForcingKind::Fixed;
            p.source = [f0](double) { return f0; };
            const Trajectory tr = solve_linear(p, make_schedule(0.05, 4.0, {0.5, 1.0, 2.0, 4.0}));
            for (std::size_t i = 0; i < tr.times.size(); ++i) {
                const double rhs = lq_norm(u0, q) + tr.times[i] * lq_norm(u1, q) + lq_norm(f0, q);
                const double r = lq_norm(tr.snapshots[i], q) / rhs;
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
        }
    }
    CHECK(hi < 10.0);
    CHECK(lo > 0.0);
}

TEST_CASE("solver input validation") {
    const SpatialGrid g(1, 64, 8.0);
    const SpatialGrid other(1, 128, 8.0);
    CHECK_THROWS_AS(solve_linear(linear(Field(g), Field(other)), make_schedule(0.1, 1.0, {1.0})), Error);
    CHECK_THROWS_AS(make_schedule(0.0, 1.0, {1.0}), Error);
    CauchyProblem p = linear(Field(g), Field(g));
    p.forcing = ForcingKind::Fixed;
    CHECK_THROWS_AS(solve_linear(p, make_schedule(0.1, 1.0, {1.0})), Error);
}
