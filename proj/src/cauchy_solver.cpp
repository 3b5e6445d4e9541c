#include "fracdiff/cauchy_solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "fracdiff/error.hpp"
#include "fracdiff/special_functions.hpp"

namespace fracdiff {

std::vector<double> TimeStepping::output_times() const {
    std::vector<double> t;
    t.reserve(output_nodes.size());
    for (int k : output_nodes) {
        t.push_back(grid.t(k));
    }
    return t;
}

TimeStepping make_schedule(double h, double t_end, const std::vector<double>& out_times) {
    require(h > 0.0 && t_end > 0.0, "make_schedule: step and horizon must be positive");
    const int steps = std::max(1, static_cast<int>(std::lround(t_end / h)));
    TimeStepping s{TimeGrid(h, steps), {}};
    for (double t : out_times) {
        require(t >= 0.0 && t <= s.grid.t_end() + 0.5 * h,
                "make_schedule: output time outside [0, t_end]");
        s.output_nodes.push_back(std::clamp(static_cast<int>(std::lround(t / h)), 0, steps));
    }
    std::sort(s.output_nodes.begin(), s.output_nodes.end());
    s.output_nodes.erase(std::unique(s.output_nodes.begin(), s.output_nodes.end()),
                         s.output_nodes.end());
    return s;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
    require(lo > 0.0 && hi > lo && count >= 2, "log_spaced: need 0 < lo < hi and count >= 2");
    std::vector<double> t(count);
    for (int i = 0; i < count; ++i) {
        t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    }
    return t;
}

const char* solve_status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Completed: return "completed";
        case SolveStatus::Blowup: return "blowup";
        case SolveStatus::QuadratureFailure: return "quadrature_failure";
    }
    return "?";
}

std::vector<double> Trajectory::norms(double q) const {
    std::vector<double> n;
    n.reserve(snapshots.size());
    for (const Field& f : snapshots) {
        n.push_back(lq_norm(f, q));
    }
    return n;
}

std::vector<double> Trajectory::nonlinear_norms(double q) const {
    std::vector<double> n;
    n.reserve(nonlinear.size());
    for (const Field& f : nonlinear) {
        n.push_back(lq_norm(f, q));
    }
    return n;
}

namespace {

// Spectral workspace shared by all solvers: shells, FFT, (|xi|^2)^{m_L} per shell.
struct Modes {
    SpectralLayout layout;
    FftPlan fft;
    std::vector<double> symbol;  // (|xi|^2)^{m_L}

    Modes(const SpatialGrid& grid, double laplacian_power) : layout(grid), fft(grid) {
        require(laplacian_power >= 1.0, "laplacian_power must be >= 1");
        symbol.resize(layout.shells().size());
        for (std::uint32_t s = 0; s < symbol.size(); ++s) {
            symbol[s] = std::pow(layout.xi_squared(s), laplacian_power);
        }
    }

    std::size_t size() const { return layout.size(); }
    std::uint32_t shell(std::size_t i) const { return layout.shell_of(i); }
};

// E_{a,beta}(-t^a sym) for every shell at time t.
std::vector<double> ml_shells(const MittagLefflerTable& table, const Modes& modes, double t) {
    const double ta = std::pow(t, table.a());
    std::vector<double> out(modes.symbol.size());
    for (std::size_t s = 0; s < out.size(); ++s) {
        out[s] = table(ta * modes.symbol[s]);
    }
    return out;
}

// out += c(shell) * in, elementwise over the spectrum.
void axpy_shells(Spectrum& out, const std::vector<double>& c, const Spectrum& in,
                 const Modes& modes) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += c[modes.shell(i)] * in[i];
    }
}

// Product-trapezoid quadrature of int_0^{t_k} tau^{w-1} E_{a,b}(-tau^a sym) F(t_k - tau) dtau
// over the nodes of a uniform grid. The kernel factor is smooth; the weight's
// moments are exact per panel.
class Duhamel {
public:
    Duhamel(const Modes& modes, double a, double kernel_beta, double weight_beta,
            const TimeGrid& grid)
        : modes_(modes),
          table_(a, kernel_beta),
          moments_(lag_moments(weight_beta, grid.n_steps)),
          scale_(std::pow(grid.h, weight_beta)),
          grid_(grid) {}

    // Node weight per shell for the node at lag m, when the sum runs to step k.
    const std::vector<double>& weight(int m, int k) {
        const LagWeights& w = lag(m);
        if (m == 0) return w.hi_only;
        return m == k ? w.lo_only : w.both;
    }

    // sum_{j in [j_lo, j_hi]} w_{k,j} F_j into out.
    void accumulate(int k, int j_lo, int j_hi, const std::vector<Spectrum>& history,
                    Spectrum& out) {
        for (int j = j_lo; j <= j_hi; ++j) {
            axpy_shells(out, weight(k - j, k), history[j], modes_);
        }
    }

private:
    struct LagWeights {
        std::vector<double> both;     // interior node: panels on either side
        std::vector<double> lo_only;  // node at t = 0
        std::vector<double> hi_only;  // newest node
    };

    const LagWeights& lag(int m) {
        auto it = cache_.find(m);
        if (it != cache_.end()) {
            return it->second;
        }
        const std::vector<double> kv = ml_shells(table_, modes_, grid_.t(m));
        const double lo = m >= 1 ? moments_.lo[m] : 0.0;
        const double hi = m + 1 <= grid_.n_steps ? moments_.hi[m + 1] : 0.0;
        LagWeights w;
        w.both.resize(kv.size());
        w.lo_only.resize(kv.size());
        w.hi_only.resize(kv.size());
        for (std::size_t s = 0; s < kv.size(); ++s) {
            w.both[s] = scale_ * (lo + hi) * kv[s];
            w.lo_only[s] = scale_ * lo * kv[s];
            w.hi_only[s] = scale_ * hi * kv[s];
        }
        return cache_.emplace(m, std::move(w)).first->second;
    }

    const Modes& modes_;
    MittagLefflerTable table_;
    LagMoments moments_;
    double scale_;
    TimeGrid grid_;
    std::map<int, LagWeights> cache_;
};

void check_schedule(const TimeStepping& s) {
    require(!s.output_nodes.empty(), "solver: no output instants requested");
    for (int k : s.output_nodes) {
        require(k >= 0 && k <= s.grid.n_steps, "solver: output node outside the time grid");
    }
}

void check_data(const Field& a, const Field& b) {
    require(!a.values.empty() && a.grid == b.grid, "solver: data fields must share a grid");
}

std::vector<Spectrum> forcing_history(const ForcingFn& source, Modes& modes, const TimeGrid& grid,
                                      int last) {
    std::vector<Spectrum> h;
    h.reserve(static_cast<std::size_t>(last) + 1);
    for (int j = 0; j <= last; ++j) {
        const Field f = source(grid.t(j));
        require(f.grid == modes.layout.grid(), "solver: forcing field on the wrong grid");
        h.push_back(modes.fft.forward(f.values));
    }
    return h;
}

Field to_field(Modes& modes, const Spectrum& s) {
    return Field(modes.layout.grid(), modes.fft.inverse(s));
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

}  // namespace

Trajectory solve_linear(const CauchyProblem& problem, const TimeStepping& schedule) {
    check_data(problem.u0, problem.u1);
    check_schedule(schedule);
    require(problem.forcing != ForcingKind::Semilinear,
            "solve_linear: semilinear problems go through solve_semilinear");
    const bool forced = problem.forcing == ForcingKind::Fixed;
    require(!forced || static_cast<bool>(problem.source), "solve_linear: fixed forcing needs a source");

    Modes modes(problem.u0.grid, problem.laplacian_power);
    const double a = problem.alpha.order();
    const Spectrum u0 = modes.fft.forward(problem.u0.values);
    const Spectrum u1 = modes.fft.forward(problem.u1.values);
    MittagLefflerTable e1(a, 1.0);
    MittagLefflerTable e2(a, 2.0);

    Trajectory out;
    out.space = problem.u0.grid;
    try {
        std::vector<Spectrum> history;
        std::unique_ptr<Duhamel> duhamel;
        if (forced) {
            history = forcing_history(problem.source, modes, schedule.grid,
                                      schedule.output_nodes.back());
            duhamel = std::make_unique<Duhamel>(modes, a, a, a, schedule.grid);
        }
        for (int k : schedule.output_nodes) {
            const double t = schedule.grid.t(k);
            Spectrum u(modes.size(), {0.0, 0.0});
            auto c1 = ml_shells(e1, modes, t);
            auto c2 = ml_shells(e2, modes, t);
            for (double& c : c2) c *= t;
            axpy_shells(u, c1, u0, modes);
            axpy_shells(u, c2, u1, modes);
            if (forced && k > 0) {
                duhamel->accumulate(k, 0, k, history, u);
            }
            out.times.push_back(t);
            out.snapshots.push_back(to_field(modes, u));
            out.steps_taken = static_cast<std::size_t>(k);
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::QuadratureFailure) throw;
        out.status = SolveStatus::QuadratureFailure;
    }
    return out;
}

Trajectory solve_semilinear(const CauchyProblem& problem, const TimeStepping& schedule,
                            const SemilinearOptions& options) {
    check_data(problem.u0, problem.u1);
    check_schedule(schedule);
    require(problem.forcing == ForcingKind::Semilinear, "solve_semilinear: problem is not semilinear");
    if (!(problem.power > 1.0)) {
        fail(ErrorCode::InvalidExponent, "solve_semilinear: p must exceed 1");
    }
    require(options.picard_sweeps >= 0 && options.picard_sweeps <= 3,
            "solve_semilinear: picard_sweeps must lie in [0, 3]");

    const TimeGrid& grid = schedule.grid;
    const int last = schedule.output_nodes.back();
    Modes modes(problem.u0.grid, problem.laplacian_power);
    const double a = problem.alpha.order();
    const double p = problem.power;
    const Spectrum u0 = modes.fft.forward(problem.u0.values);
    const Spectrum u1 = modes.fft.forward(problem.u1.values);
    MittagLefflerTable e1(a, 1.0);
    MittagLefflerTable e2(a, 2.0);
    Duhamel duhamel(modes, a, a, a, grid);

    double threshold = options.blowup_threshold;
    if (!(threshold > 0.0)) {
        const double scale = std::max(max_abs(problem.u0.values), max_abs(problem.u1.values));
        threshold = 1e6 * (scale > 0.0 ? scale : 1.0);
    }

    auto power_spectrum = [&](const std::vector<double>& u) {
        std::vector<double> f(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            f[i] = std::pow(std::abs(u[i]), p);
        }
        return modes.fft.forward(f);
    };

    Trajectory out;
    out.space = problem.u0.grid;
    std::vector<Spectrum> history;
    history.reserve(static_cast<std::size_t>(last) + 1);
    std::size_t next_output = 0;
    try {
        for (int k = 0; k <= last; ++k) {
            const double t = grid.t(k);
            Spectrum lin(modes.size(), {0.0, 0.0});
            {
                auto c1 = ml_shells(e1, modes, t);
                auto c2 = ml_shells(e2, modes, t);
                for (double& c : c2) c *= t;
                axpy_shells(lin, c1, u0, modes);
                axpy_shells(lin, c2, u1, modes);
            }
            Spectrum past(modes.size(), {0.0, 0.0});
            std::vector<double> u;
            Spectrum nonlinear;
            if (k == 0) {
                u = modes.fft.inverse(lin);
                nonlinear = past;
            } else {
                duhamel.accumulate(k, 0, k - 1, history, past);
                const std::vector<double>& w_new = duhamel.weight(0, k);
                Spectrum newest = history.back();  // predictor: F(t_k) ~ F(t_{k-1})
                for (int sweep = 0; sweep <= options.picard_sweeps; ++sweep) {
                    nonlinear = past;
                    axpy_shells(nonlinear, w_new, newest, modes);
                    Spectrum total = lin;
                    for (std::size_t i = 0; i < total.size(); ++i) total[i] += nonlinear[i];
                    u = modes.fft.inverse(total);
                    if (sweep < options.picard_sweeps) {
                        newest = power_spectrum(u);
                    }
                }
            }
            out.steps_taken = static_cast<std::size_t>(k);
            const double peak = max_abs(u);
            if (!std::isfinite(peak) || peak > threshold) {
                out.status = SolveStatus::Blowup;
                out.blowup_time = t;
                break;
            }
            history.push_back(power_spectrum(u));
            if (next_output < schedule.output_nodes.size() &&
                schedule.output_nodes[next_output] == k) {
                out.times.push_back(t);
                out.snapshots.emplace_back(modes.layout.grid(), std::move(u));
                out.nonlinear.push_back(to_field(modes, nonlinear));
                ++next_output;
            }
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::QuadratureFailure) throw;
        out.status = SolveStatus::QuadratureFailure;
    }
    return out;
}

Trajectory reconstruct_ut(const CauchyProblem& problem, const TimeStepping& schedule) {
    check_data(problem.u0, problem.u1);
    check_schedule(schedule);
    require(problem.forcing != ForcingKind::Semilinear, "reconstruct_ut: linear problems only");
    const bool forced = problem.forcing == ForcingKind::Fixed;
    require(!forced || static_cast<bool>(problem.source), "reconstruct_ut: fixed forcing needs a source");

    Modes modes(problem.u0.grid, problem.laplacian_power);
    const double alpha = problem.alpha.alpha;
    const double a = problem.alpha.order();
    const Spectrum u0 = modes.fft.forward(problem.u0.values);
    const Spectrum u1 = modes.fft.forward(problem.u1.values);
    MittagLefflerTable e0(a, 0.0);
    MittagLefflerTable e1(a, 1.0);

    Trajectory out;
    out.space = problem.u0.grid;
    try {
        std::vector<Spectrum> history;
        std::unique_ptr<Duhamel> duhamel;
        if (forced) {
            history = forcing_history(problem.source, modes, schedule.grid,
                                      schedule.output_nodes.back());
            duhamel = std::make_unique<Duhamel>(modes, a, alpha, alpha, schedule.grid);
        }
        for (int k : schedule.output_nodes) {
            const double t = schedule.grid.t(k);
            Spectrum u(modes.size(), {0.0, 0.0});
            if (t > 0.0) {
                // t^{-1} E_{a,0}(-t^a s) -> 0 as t -> 0, so the u0 term starts at zero.
                auto c0 = ml_shells(e0, modes, t);
                for (double& c : c0) c /= t;
                axpy_shells(u, c0, u0, modes);
            }
            axpy_shells(u, ml_shells(e1, modes, t), u1, modes);
            if (forced && k > 0) {
                duhamel->accumulate(k, 0, k, history, u);
            }
            out.times.push_back(t);
            out.snapshots.push_back(to_field(modes, u));
            out.steps_taken = static_cast<std::size_t>(k);
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::QuadratureFailure) throw;
        out.status = SolveStatus::QuadratureFailure;
    }
    return out;
}

Trajectory solve_rl_problem(const RLProblem& problem, const TimeStepping& schedule) {
    check_data(problem.v, problem.u_alpha);
    check_schedule(schedule);
    const bool v_nonzero = max_abs(problem.v.values) > 0.0;
    require(!(v_nonzero && schedule.output_nodes.front() == 0),
            "solve_rl_problem: the t^{alpha-1} term is singular at t = 0; drop that instant");

    Modes modes(problem.v.grid, problem.laplacian_power);
    const double alpha = problem.alpha.alpha;
    const double a = problem.alpha.order();
    const Spectrum v = modes.fft.forward(problem.v.values);
    const Spectrum ua = modes.fft.forward(problem.u_alpha.values);
    MittagLefflerTable ea(a, alpha);
    MittagLefflerTable eaa(a, a);

    Trajectory out;
    out.space = problem.v.grid;
    try {
        std::vector<Spectrum> history;
        std::unique_ptr<Duhamel> duhamel;
        if (problem.source) {
            history = forcing_history(problem.source, modes, schedule.grid,
                                      schedule.output_nodes.back());
            duhamel = std::make_unique<Duhamel>(modes, a, a, a, schedule.grid);
        }
        for (int k : schedule.output_nodes) {
            const double t = schedule.grid.t(k);
            Spectrum u(modes.size(), {0.0, 0.0});
            if (t > 0.0) {
                auto cv = ml_shells(ea, modes, t);
                const double pv = std::pow(t, alpha - 1.0);
                for (double& c : cv) c *= pv;
                axpy_shells(u, cv, v, modes);
                auto ca = ml_shells(eaa, modes, t);
                const double pa = std::pow(t, alpha);
                for (double& c : ca) c *= pa;
                axpy_shells(u, ca, ua, modes);
            }
            if (duhamel && k > 0) {
                duhamel->accumulate(k, 0, k, history, u);
            }
            out.times.push_back(t);
            out.snapshots.push_back(to_field(modes, u));
            out.steps_taken = static_cast<std::size_t>(k);
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::QuadratureFailure) throw;
        out.status = SolveStatus::QuadratureFailure;
    }
    return out;
}

}  // namespace fracdiff
