#include "fracdiff/analysis_harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fracdiff/error.hpp"
#include "fracdiff/quadrature.hpp"

namespace fracdiff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double positive_or_inf(double numerator, double denominator) {
    return denominator > 0.0 ? 1.0 + numerator / denominator : kInf;
}

double inv(double q) { return std::isinf(q) ? 0.0 : 1.0 / q; }

}  // namespace

double p_bar(double n, double alpha) { return positive_or_inf(2.0, n - 2.0 / (1.0 + alpha)); }

double p_tilde(double n, double alpha) {
    return positive_or_inf(2.0, n - 2.0 + 2.0 / (1.0 + alpha));
}

double p_hat(double n, double alpha) { return positive_or_inf(2.0 * (1.0 + alpha), n - 2.0 * alpha); }

CriticalExponents critical_exponents(int n, double alpha) {
    require(n >= 1, "critical_exponents: n must be >= 1");
    require(alpha >= 0.0 && alpha <= 1.0, "critical_exponents: alpha must lie in [0, 1]");
    CriticalExponents c;
    c.n = n;
    c.alpha = alpha;
    c.p_bar = p_bar(n, alpha);
    c.p_tilde = p_tilde(n, alpha);
    c.p_hat = p_hat(n, alpha);
    c.p_memory_crit = std::max(c.p_hat, alpha < 1.0 ? 1.0 / (1.0 - alpha) : kInf);
    return c;
}

double q_scaling(int n, double alpha, double p) {
    if (!(p > 1.0)) {
        fail(ErrorCode::InvalidExponent, "q_scaling: p must exceed 1");
    }
    if (std::isinf(p)) {
        return 0.5 * n * (1.0 + alpha);
    }
    return 0.5 * n * (p - 1.0) * (1.0 + alpha) / (p + alpha);
}

double q_scaling_inverse(int n, double alpha, double q) {
    require(q > 0.0, "q_scaling_inverse: q must be positive");
    const double na = n * (1.0 + alpha);
    const double denom = na - 2.0 * q;
    return denom > 0.0 ? (na + 2.0 * q * alpha) / denom : kInf;
}

BetaQ beta_q(int n, double alpha, double q, double delta) {
    require(delta > 0.0, "beta_q: delta must be positive");
    if (!(q >= 1.0)) {
        fail(ErrorCode::InvalidExponent, "beta_q: q must be >= 1");
    }
    BetaQ b;
    const double main = 0.5 * n * (1.0 + alpha) * (1.0 - inv(q));
    b.value = std::min(main, 1.0 + alpha - delta);
    if (n == 2) {
        b.untruncated = !std::isinf(q);
    } else if (n >= 3) {
        b.untruncated = q < 1.0 + 2.0 / (n - 2.0);
    }
    return b;
}

const char* decay_case_name(DecayCase c) {
    switch (c) {
        case DecayCase::HomU0: return "hom_u0";
        case DecayCase::HomU1: return "hom_u1";
        case DecayCase::Forced: return "forced";
        case DecayCase::SemilinearThm10: return "semilinear_thm10";
        case DecayCase::SemilinearThm00: return "semilinear_thm00";
        case DecayCase::Gradient: return "gradient";
    }
    return "?";
}

DecayCase parse_decay_case(const std::string& name) {
    for (DecayCase c : {DecayCase::HomU0, DecayCase::HomU1, DecayCase::Forced,
                        DecayCase::SemilinearThm10, DecayCase::SemilinearThm00,
                        DecayCase::Gradient}) {
        if (name == decay_case_name(c)) {
            return c;
        }
    }
    fail(ErrorCode::InvalidArgument, "unknown decay case '" + name + "'");
}

double theoretical_decay(const DecayScenario& s) {
    require(s.n >= 1, "theoretical_decay: n must be >= 1");
    require(s.alpha > 0.0 && s.alpha < 1.0, "theoretical_decay: alpha must lie in (0, 1)");
    if (!(s.q >= 1.0)) {
        fail(ErrorCode::InadmissibleScenario, "theoretical_decay: q must be >= 1");
    }
    const double a = 1.0 + s.alpha;
    const double n = s.n;

    auto in_range = [&](double lhs, double bound) {
        const double gap = bound - lhs;
        if (gap > 1e-12 || (s.allow_endpoint && gap > -1e-12)) {
            return;
        }
        fail(ErrorCode::InadmissibleScenario,
             std::string("theoretical_decay: q = ") + (std::isinf(s.q) ? "inf" : std::to_string(s.q)) +
                 " is outside the proved range for " + decay_case_name(s.kind) +
                 (std::abs(gap) <= 1e-12 ? " (endpoint)" : ""));
    };

    switch (s.kind) {
        case DecayCase::HomU0:
        case DecayCase::HomU1:
        case DecayCase::Forced:
        case DecayCase::Gradient: {
            if (!(s.r >= 1.0 && s.r <= s.q)) {
                fail(ErrorCode::InadmissibleScenario, "theoretical_decay: need 1 <= r <= q");
            }
            const double gap = inv(s.r) - inv(s.q);
            const double smoothing = 0.5 * n * a * gap;
            if (s.kind == DecayCase::Gradient) {
                in_range(n * gap, 1.0);
                return -smoothing - 0.5 * a;
            }
            in_range(0.5 * n * gap, 1.0);
            if (s.kind == DecayCase::HomU0) return -smoothing;
            if (s.kind == DecayCase::HomU1) return 1.0 - smoothing;
            if (s.eta >= 1.0) return s.alpha - smoothing;  // eta = 1 carries an extra log
            return 1.0 - s.eta + s.alpha - smoothing;
        }
        case DecayCase::SemilinearThm10:
            return 1.0 - beta_q(s.n, s.alpha, s.q, s.delta).value;
        case DecayCase::SemilinearThm00:
            return s.alpha - beta_q(s.n, s.alpha, s.q, s.delta).value;
    }
    fail(ErrorCode::Internal, "theoretical_decay: unknown case");
}

DecayFit decay_fit(const std::vector<double>& times, const std::vector<double>& norms,
                   double window) {
    require(times.size() == norms.size(), "decay_fit: times and norms differ in length");
    require(window > 0.0 && window <= 1.0, "decay_fit: window must lie in (0, 1]");
    const std::size_t total = times.size();
    const std::size_t count = std::min(
        total, static_cast<std::size_t>(std::ceil(window * static_cast<double>(total) - 1e-9)));
    if (count < 8) {
        fail(ErrorCode::DegenerateFit, "decay_fit: fewer than 8 points in the fit window");
    }
    const std::size_t first = total - count;
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = first; i < total; ++i) {
        require(norms[i] > 0.0 && std::isfinite(norms[i]), "decay_fit: norms must be positive");
        require(times[i] >= 0.0, "decay_fit: times must be >= 0");
        mx += std::log1p(times[i]);
        my += std::log(norms[i]);
    }
    mx /= count;
    my /= count;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = first; i < total; ++i) {
        const double dx = std::log1p(times[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(norms[i]) - my);
    }
    if (!(sxx > 1e-300)) {
        fail(ErrorCode::DegenerateFit, "decay_fit: log(1+t) has no spread in the window");
    }
    DecayFit fit;
    fit.exponent = sxy / sxx;
    fit.points = count;
    double ss = 0.0;
    for (std::size_t i = first; i < total; ++i) {
        const double dx = std::log1p(times[i]) - mx;
        const double r = std::log(norms[i]) - my - fit.exponent * dx;
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / count);
    return fit;
}

// ---------------------------------------------------------------------------
// Integral majorants

namespace {

int branch_of(double b) {
    if (b > 1.0) return 0;
    if (b == 1.0) return 1;
    return 2;
}

double pick(const BoundConstants& c, int branch) {
    return branch == 0 ? c.above_one : (branch == 1 ? c.at_one : c.below_one);
}

void check_a(double a, const char* who) {
    if (!(a < 1.0)) {
        fail(ErrorCode::InvalidExponent, std::string(who) + ": a must be < 1");
    }
}

// int_0^t g(s) (t-s)^{-a} ds with the endpoint singularity removed by
// u = (t-s)^{1-a}/(1-a) when a > 0.
double singular_integral(const std::function<double(double)>& g, double a, double t) {
    if (t <= 0.0) {
        return 0.0;
    }
    QuadratureOptions opts;
    opts.rel_tol = 1e-11;
    opts.max_intervals = 8000;
    QuadratureResult r;
    if (a > 0.0) {
        const double e = 1.0 - a;
        const double top = std::pow(t, e) / e;
        auto f = [&](double u) {
            const double s = t - std::pow(e * u, 1.0 / e);
            return g(std::max(s, 0.0));
        };
        const double mid = std::pow(0.5 * t, e) / e;
        const double breaks[] = {0.0, mid, top};
        r = integrate_adaptive(f, breaks, opts);
    } else {
        auto f = [&](double s) { return std::pow(t - s, -a) * g(s); };
        const double breaks[] = {0.0, 0.5 * t, t};
        r = integrate_adaptive(f, breaks, opts);
    }
    if (!r.converged) {
        fail(ErrorCode::QuadratureFailure, "envelope integral did not converge");
    }
    return r.value;
}

}  // namespace

BoundConstants integral_bound_constants() {
    // 1.2 x the largest quadrature/shape ratio on bound_corpus(20240601, 50, false).
    return {1.2 * 1.9950362399012378, 1.2 * 798.12605419370732, 1.2 * 2.8803382861429663};
}

BoundConstants integral_bound_extended_constants() {
    // 1.2 x the largest quadrature/shape ratio on bound_corpus(20240601, 50, true).
    return {1.2 * 0.58537390634167485, 1.2 * 0.60696068115806001, 1.2 * 0.68906334576254558};
}

double integral_bound_shape(double a, double b, double t) {
    check_a(a, "integral_bound");
    require(t >= 0.0, "integral_bound: t must be >= 0");
    const double T = 1.0 + t;
    switch (branch_of(b)) {
        case 0: return std::pow(T, -a);
        case 1: return std::log(T) / T;
        default: return std::pow(T, 1.0 - a - b);
    }
}

double integral_bound(double a, double b, double t) {
    return pick(integral_bound_constants(), branch_of(b)) * integral_bound_shape(a, b, t);
}

double integral_bound_extended_shape(double a0, double b0, double a1, double b1, double t) {
    check_a(a1, "integral_bound_extended");
    require(t >= 0.0, "integral_bound_extended: t must be >= 0");
    const double T = 1.0 + t;
    double first = 0.0;
    switch (branch_of(b0)) {
        case 0: first = std::pow(T, -a0); break;
        case 1: first = std::pow(T, -a0) * std::log(T); break;
        default: first = std::pow(T, 1.0 - a0 - b0); break;
    }
    return std::pow(T, 1.0 - a1 - b1) + first;
}

double integral_bound_extended(double a0, double b0, double a1, double b1, double t) {
    return pick(integral_bound_extended_constants(), branch_of(b0)) *
           integral_bound_extended_shape(a0, b0, a1, b1, t);
}

double envelope_integral(double a, double b, double t) {
    check_a(a, "envelope_integral");
    return singular_integral([b](double s) { return std::pow(1.0 + s, -b); }, a, t);
}

double envelope_integral_extended(double a0, double b0, double a1, double b1, double t) {
    check_a(a1, "envelope_integral_extended");
    if (t <= 0.0) {
        return 0.0;
    }
    // Near s = t the min behaves like (t-s)^{-min(a0,a1)}; that power is the one
    // the substitution removes.
    const double a_sub = std::min(a0, a1);
    auto g = [=](double s) {
        const double w = t - s;
        if (w <= 0.0) {
            return a0 <= a1 ? std::pow(1.0 + s, -b0) : std::pow(1.0 + s, -b1);
        }
        const double e0 = std::pow(w, a_sub - a0) * std::pow(1.0 + s, -b0);
        const double e1 = std::pow(w, a_sub - a1) * std::pow(1.0 + s, -b1);
        return std::min(e0, e1);
    };
    return singular_integral(g, a_sub, t);
}

std::vector<BoundSample> bound_corpus(unsigned seed, int count, bool extended) {
    require(count >= 1, "bound_corpus: count must be positive");
    std::mt19937 gen(seed);
    // mt19937's output sequence is fixed by the standard; distributions are not.
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(gen()) / 4294967296.0);
    };
    std::vector<BoundSample> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        BoundSample s{};
        s.branch = i % 3;
        const double b = s.branch == 0 ? uniform(1.2, 3.0) : (s.branch == 1 ? 1.0 : uniform(-1.0, 0.8));
        s.t = std::exp(uniform(std::log(0.5), std::log(100.0)));
        if (extended) {
            s.a0 = uniform(-1.0, 0.8);
            s.b0 = b;
            s.a1 = uniform(-1.0, 0.8);
            s.b1 = uniform(-1.0, 3.0);
        } else {
            s.a0 = s.a1 = uniform(-1.0, 0.8);
            s.b0 = s.b1 = b;
        }
        out.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------------

double x_norm(const Trajectory& trajectory, XNormVariant variant, double p, double alpha) {
    if (!(p >= 1.0)) {
        fail(ErrorCode::InvalidExponent, "x_norm: p must be >= 1");
    }
    const int n = trajectory.space.dim;
    const double weight_exp = variant == XNormVariant::Thm00 ? alpha : 1.0;
    const double lp_exp = 0.5 * n * (1.0 + alpha) * (1.0 - inv(p));
    double sup = 0.0;
    for (std::size_t i = 0; i < trajectory.snapshots.size(); ++i) {
        const double T = 1.0 + trajectory.times[i];
        const Field& u = trajectory.snapshots[i];
        const double value =
            std::pow(T, -weight_exp) * (lq_norm(u, 1.0) + std::pow(T, lp_exp) * lq_norm(u, p));
        sup = std::max(sup, value);
    }
    return sup;
}

Field make_profile(const Profile& p, const SpatialGrid& grid) {
    require(p.width > 0.0, "profile: width must be positive");
    if (p.shape == "gaussian") {
        const double w2 = p.width * p.width;
        return Field::sample(grid, [&](const std::array<double, 3>& x) {
            double r2 = 0.0;
            for (int d = 0; d < grid.dim; ++d) r2 += x[d] * x[d];
            return p.amplitude * std::exp(-r2 / w2);
        });
    }
    if (p.shape == "bump") {
        const double w2 = p.width * p.width;
        return Field::sample(grid, [&](const std::array<double, 3>& x) {
            double r2 = 0.0;
            for (int d = 0; d < grid.dim; ++d) r2 += x[d] * x[d];
            const double s = r2 / w2;
            return s < 1.0 ? p.amplitude * std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
        });
    }
    if (p.shape == "mode") {
        const double xi = grid.wavenumber(p.mode);
        return Field::sample(grid, [&](const std::array<double, 3>& x) {
            return p.amplitude * std::cos(xi * x[0]);
        });
    }
    fail(ErrorCode::InvalidArgument, "unknown profile shape '" + p.shape + "'");
}

std::vector<Field> spectral_gradient(const Field& f) {
    const SpatialGrid& grid = f.grid;
    SpectralLayout layout(grid);
    FftPlan fft(grid);
    const Spectrum s = fft.forward(f.values);
    std::vector<Field> out;
    for (int c = 0; c < grid.dim; ++c) {
        Spectrum g(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            const int k = layout.wave_index(i)[c];
            const double xi = k == -grid.points / 2 ? 0.0 : grid.wavenumber(k);
            g[i] = std::complex<double>(0.0, xi) * s[i];
        }
        out.emplace_back(grid, fft.inverse(g));
    }
    return out;
}

DecayReport run_decay_scenario(const ScenarioConfig& config) {
    const DecayScenario& sc = config.scenario;
    require(config.grid.dim == sc.n, "run_decay_scenario: grid dimension differs from n");
    require(config.tolerance > 0.0, "run_decay_scenario: tolerance must be positive");
    DecayReport rep;
    rep.config = config;
    rep.theoretical_exponent = theoretical_decay(sc);

    const Field data = make_profile(config.data, config.grid);
    const Field zero(config.grid);
    const TimeStepping schedule = make_schedule(
        config.h, config.t_fit_hi, log_spaced(config.t_fit_lo, config.t_fit_hi, config.instants));

    CauchyProblem problem;
    problem.alpha = FractionalOrder(sc.alpha);
    problem.u0 = zero;
    problem.u1 = zero;
    Trajectory tr;
    switch (sc.kind) {
        case DecayCase::HomU0:
        case DecayCase::Gradient:
            problem.u0 = data;
            tr = solve_linear(problem, schedule);
            break;
        case DecayCase::HomU1:
            problem.u1 = data;
            tr = solve_linear(problem, schedule);
            break;
        case DecayCase::Forced: {
            problem.forcing = ForcingKind::Fixed;
            problem.bound_eta = sc.eta;
            problem.bound_k = lq_norm(data, sc.r);
            const double eta = sc.eta;
            problem.source = [data, eta](double t) {
                Field f = data;
                const double g = std::pow(1.0 + t, -eta);
                for (double& v : f.values) v *= g;
                return f;
            };
            tr = solve_linear(problem, schedule);
            break;
        }
        case DecayCase::SemilinearThm00:
        case DecayCase::SemilinearThm10: {
            problem.forcing = ForcingKind::Semilinear;
            problem.power = config.power;
            problem.u0 = data;
            if (sc.kind == DecayCase::SemilinearThm10) problem.u1 = data;
            SemilinearOptions opts;
            opts.picard_sweeps = config.picard_sweeps;
            tr = solve_semilinear(problem, schedule, opts);
            break;
        }
    }
    rep.status = tr.status;
    rep.blowup_time = tr.status == SolveStatus::Blowup ? tr.blowup_time : 0.0;
    rep.times = tr.times;
    if (sc.kind == DecayCase::Gradient) {
        for (const Field& u : tr.snapshots) {
            rep.norms.push_back(lq_norm(magnitude(spectral_gradient(u)), sc.q));
        }
    } else {
        rep.norms = tr.norms(sc.q);
    }
    rep.nonlinear_norms = tr.nonlinear_norms(sc.q);

    if (tr.status != SolveStatus::Completed) {
        rep.note = std::string("run ended with status ") + solve_status_name(tr.status);
        return rep;
    }
    const DecayFit fit = decay_fit(rep.times, rep.norms, config.window);
    rep.fitted_exponent = fit.exponent;
    rep.fit_residual = fit.residual;
    if (!rep.nonlinear_norms.empty()) {
        bool positive = true;
        for (double v : rep.nonlinear_norms) positive = positive && v > 0.0;
        if (positive) {
            rep.nonlinear_exponent = decay_fit(rep.times, rep.nonlinear_norms, config.window).exponent;
        }
    }
    rep.pass = std::abs(rep.fitted_exponent - rep.theoretical_exponent) <= config.tolerance;
    return rep;
}

}  // namespace fracdiff
