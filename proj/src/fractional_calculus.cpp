#include "fracdiff/fractional_calculus.hpp"

#include <algorithm>
#include <cmath>

#include "fracdiff/error.hpp"
#include "fracdiff/quadrature.hpp"
#include "fracdiff/special_functions.hpp"

namespace fracdiff {

TimeGrid::TimeGrid(double step, int steps) : h(step), n_steps(steps) {
    require(step > 0.0 && std::isfinite(step), "TimeGrid: step must be positive");
    require(steps >= 1, "TimeGrid: need at least one step");
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> t(size());
    for (int i = 0; i <= n_steps; ++i) {
        t[i] = this->t(i);
    }
    return t;
}

TimeSeries::TimeSeries(TimeGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    require(values.size() == grid.size(), "TimeSeries: values must have n_steps + 1 entries");
    for (double x : values) {
        require(std::isfinite(x), "TimeSeries: values must be finite");
    }
}

FractionalOrder::FractionalOrder(double a) : alpha(a) {
    if (!(a > 0.0 && a < 1.0)) {
        fail(ErrorCode::InvalidOrder, "FractionalOrder: alpha must lie in (0, 1)");
    }
}

LagMoments lag_moments(double beta, int n) {
    require(beta > 0.0, "lag_moments: beta must be positive");
    LagMoments w;
    w.beta = beta;
    w.lo.assign(static_cast<std::size_t>(n) + 1, 0.0);
    w.hi.assign(static_cast<std::size_t>(n) + 1, 0.0);
    if (n < 1) {
        return w;
    }
    // Panel at lag [0, 1] carries the singularity; closed form.
    w.lo[1] = 1.0 / (beta + 1.0);
    w.hi[1] = 1.0 / (beta * (beta + 1.0));
    // Further panels: int_0^1 (m - th)^{beta-1} {1-th, th} dth via the binomial
    // series in 1/m. Avoids the cancellation of the textbook difference formula.
    for (int m = 2; m <= n; ++m) {
        const double x = 1.0 / m;
        double c = 1.0;
        double xk = 1.0;
        NeumaierSum s_lo;
        NeumaierSum s_hi;
        for (int k = 0; k < 200; ++k) {
            const double term = c * xk;
            s_lo.add(term / ((k + 1.0) * (k + 2.0)));
            s_hi.add(term / (k + 2.0));
            if (std::abs(term) < 1e-18) {
                break;
            }
            c *= (k + 1.0 - beta) / (k + 1.0);
            xk *= x;
            if (c == 0.0) {
                break;
            }
        }
        const double scale = std::pow(static_cast<double>(m), beta - 1.0);
        w.lo[m] = scale * s_lo.value();
        w.hi[m] = scale * s_hi.value();
    }
    return w;
}

TimeSeries rl_integral(const TimeSeries& f, double beta) {
    require(beta > 0.0, "rl_integral: beta must be positive");
    const int n = f.grid.n_steps;
    const LagMoments w = lag_moments(beta, n);
    const double scale = std::pow(f.grid.h, beta) * gamma_reciprocal(beta);
    std::vector<double> out(f.values.size(), 0.0);
    const double* v = f.values.data();
    for (int i = 1; i <= n; ++i) {
        double acc = 0.0;
        for (int m = 1; m <= i; ++m) {
            acc += w.lo[m] * v[i - m] + w.hi[m] * v[i - m + 1];
        }
        out[i] = scale * acc;
    }
    return TimeSeries(f.grid, std::move(out));
}

namespace {

struct SplitOrder {
    int j;
    double alpha;
};

SplitOrder split_order(double order, const char* who) {
    if (order > 0.0 && order < 1.0) {
        return {0, order};
    }
    if (order > 1.0 && order < 2.0) {
        return {1, order - 1.0};
    }
    fail(ErrorCode::InvalidOrder, std::string(who) + ": order must lie in (0,1) or (1,2)");
}

void require_steps(const TimeGrid& g, const char* who) {
    if (g.n_steps < 4) {
        fail(ErrorCode::GridTooCoarse, std::string(who) + ": need at least 4 steps");
    }
}

std::vector<double> first_difference(const std::vector<double>& v, double h) {
    const std::size_t n = v.size() - 1;
    std::vector<double> d(v.size());
    d[0] = (v[1] - v[0]) / h;
    for (std::size_t i = 1; i <= n; ++i) {
        d[i] = (v[i] - v[i - 1]) / h;
    }
    return d;
}

std::vector<double> second_difference(const std::vector<double>& v, double h) {
    const std::size_t n = v.size() - 1;
    const double h2 = h * h;
    std::vector<double> d(v.size());
    d[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
    for (std::size_t i = 1; i < n; ++i) {
        d[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
    }
    d[n] = (2.0 * v[n] - 5.0 * v[n - 1] + 4.0 * v[n - 2] - v[n - 3]) / h2;
    return d;
}

std::vector<double> centered_first_difference(const std::vector<double>& v, double h) {
    const std::size_t n = v.size() - 1;
    std::vector<double> d(v.size());
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    for (std::size_t i = 1; i < n; ++i) {
        d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    d[n] = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h);
    return d;
}

double max_abs_from(const TimeGrid& g, const std::vector<double>& r, double t_min) {
    double worst = 0.0;
    for (int i = 0; i <= g.n_steps; ++i) {
        if (g.t(i) >= t_min - 1e-12 * g.h) {
            worst = std::max(worst, std::abs(r[i]));
        }
    }
    return worst;
}

}  // namespace

TimeSeries caputo_derivative(const TimeSeries& u, double order) {
    const SplitOrder s = split_order(order, "caputo_derivative");
    require_steps(u.grid, "caputo_derivative");
    std::vector<double> d = s.j == 0 ? centered_first_difference(u.values, u.grid.h)
                                     : second_difference(u.values, u.grid.h);
    return rl_integral(TimeSeries(u.grid, std::move(d)), 1.0 - s.alpha);
}

TimeSeries rl_derivative(const TimeSeries& h, double order) {
    const SplitOrder s = split_order(order, "rl_derivative");
    require_steps(h.grid, "rl_derivative");
    const TimeSeries v = rl_integral(h, 1.0 - s.alpha);
    std::vector<double> d = s.j == 0 ? first_difference(v.values, h.grid.h)
                                     : second_difference(v.values, h.grid.h);
    return TimeSeries(h.grid, std::move(d));
}

double verify_caputo_rl_relation(const TimeSeries& g, FractionalOrder alpha, int j,
                                 double t_min) {
    require(j == 0 || j == 1, "verify_caputo_rl_relation: j must be 0 or 1");
    require_steps(g.grid, "verify_caputo_rl_relation");
    const double h = g.grid.h;
    const auto& v = g.values;
    const double g0 = v[0];
    const double g1 = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    std::vector<double> reduced(v.size());
    for (int i = 0; i <= g.grid.n_steps; ++i) {
        const double t = g.grid.t(i);
        reduced[i] = v[i] - g0 - (j == 1 ? g1 * t : 0.0);
    }
    const double order = j + alpha.alpha;
    const TimeSeries lhs = caputo_derivative(g, order);
    const TimeSeries rhs = rl_derivative(TimeSeries(g.grid, std::move(reduced)), order);
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = lhs.values[i] - rhs.values[i];
    }
    return max_abs_from(g.grid, r, t_min);
}

TimeSeries ode_solution(FractionalOrder alpha, double lambda, double b0, double b1,
                        const TimeSeries& f) {
    require(lambda <= 0.0, "ode_solution: lambda must be <= 0");
    const TimeGrid& grid = f.grid;
    const int n = grid.n_steps;
    const double a = alpha.order();
    auto ml = [&](double beta, double t) {
        const double x = -lambda * std::pow(t, a);
        return eval_ml(a, beta, x);
    };
    // Memory kernel: weight tau^alpha against E_{a,a}(lambda tau^a) f, both smooth.
    std::vector<double> kernel(static_cast<std::size_t>(n) + 1);
    for (int m = 0; m <= n; ++m) {
        kernel[m] = ml(a, grid.t(m));
    }
    const LagMoments w = lag_moments(a, n);
    const double scale = std::pow(grid.h, a);
    std::vector<double> g(grid.size());
    for (int i = 0; i <= n; ++i) {
        const double t = grid.t(i);
        double value = b0 * ml(1.0, t) + b1 * t * ml(2.0, t);
        double acc = 0.0;
        for (int m = 1; m <= i; ++m) {
            acc += w.lo[m] * kernel[m] * f.values[i - m] +
                   w.hi[m] * kernel[m - 1] * f.values[i - m + 1];
        }
        g[i] = value + scale * acc;
    }
    return TimeSeries(grid, std::move(g));
}

double verify_ode_solution(FractionalOrder alpha, double lambda, double b0, double b1,
                           const TimeSeries& f, double t_min) {
    require_steps(f.grid, "verify_ode_solution");
    const TimeSeries g = ode_solution(alpha, lambda, b0, b1, f);
    const TimeSeries d = caputo_derivative(g, alpha.order());
    std::vector<double> r(g.values.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = d.values[i] - lambda * g.values[i] - f.values[i];
    }
    return max_abs_from(f.grid, r, t_min);
}

}  // namespace fracdiff
