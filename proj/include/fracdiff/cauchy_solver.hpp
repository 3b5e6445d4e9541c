#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "fracdiff/field.hpp"
#include "fracdiff/fractional_calculus.hpp"

namespace fracdiff {

enum class ForcingKind { None, Fixed, Semilinear };

/// f(t, .) on the spatial grid; called once per quadrature node.
using ForcingFn = std::function<Field(double)>;

/// d_t^{1+alpha} u + (-Delta)^{m_L} u = f with u(0) = u0, u_t(0) = u1, where
/// f is absent, given, or |u|^p.
struct CauchyProblem {
    FractionalOrder alpha{0.5};
    Field u0;
    Field u1;
    double laplacian_power = 1.0;
    ForcingKind forcing = ForcingKind::None;
    ForcingFn source;          // Fixed
    double bound_k = 0.0;      // ||f(t)|| <= K (1+t)^{-eta}; informational
    double bound_eta = 0.0;
    double power = 2.0;        // Semilinear
};

/// Uniform quadrature grid plus the nodes at which snapshots are kept.
struct TimeStepping {
    TimeGrid grid;
    std::vector<int> output_nodes;

    std::vector<double> output_times() const;
};

/// Snaps each requested time to the nearest node of a grid with step h covering t_end.
TimeStepping make_schedule(double h, double t_end, const std::vector<double>& out_times);

/// count points log-spaced on [lo, hi].
std::vector<double> log_spaced(double lo, double hi, int count);

enum class SolveStatus { Completed, Blowup, QuadratureFailure };
const char* solve_status_name(SolveStatus s);

struct Trajectory {
    SpatialGrid space;
    std::vector<double> times;
    std::vector<Field> snapshots;
    std::vector<Field> nonlinear;  // Duhamel part of semilinear runs, same instants
    SolveStatus status = SolveStatus::Completed;
    double blowup_time = std::numeric_limits<double>::quiet_NaN();
    std::size_t steps_taken = 0;

    std::vector<double> norms(double q) const;
    std::vector<double> nonlinear_norms(double q) const;
};

/// Homogeneous part exact per mode; Duhamel term by product-trapezoid quadrature in time.
Trajectory solve_linear(const CauchyProblem& problem, const TimeStepping& schedule);

struct SemilinearOptions {
    double blowup_threshold = 0.0;  // <= 0: 1e6 * ||u0||_inf
    int picard_sweeps = 1;
};

/// Explicit march of u = u_lin + int (t-s)^alpha G_{1+alpha,1+alpha}(t-s) * |u(s)|^p ds:
/// the newest node is predicted from the previous one and corrected by Picard sweeps.
Trajectory solve_semilinear(const CauchyProblem& problem, const TimeStepping& schedule,
                            const SemilinearOptions& options = {});

/// u_t of a linear problem from the beta in {0, alpha, 1} kernels.
Trajectory reconstruct_ut(const CauchyProblem& problem, const TimeStepping& schedule);

/// Cauchy problem with Riemann-Liouville data J^{1-alpha}u(0) = v, D^alpha u(0) = u_alpha.
struct RLProblem {
    FractionalOrder alpha{0.5};
    Field v;
    Field u_alpha;
    double laplacian_power = 1.0;
    ForcingFn source;  // optional
};

Trajectory solve_rl_problem(const RLProblem& problem, const TimeStepping& schedule);

}  // namespace fracdiff
