#pragma once

#include <vector>

namespace fracdiff {

/// Uniform grid t_i = i*h, i = 0..n_steps.
struct TimeGrid {
    double h = 1e-3;
    int n_steps = 1000;

    TimeGrid() = default;
    TimeGrid(double step, int steps);

    double t(int i) const { return h * i; }
    double t_end() const { return h * n_steps; }
    std::size_t size() const { return static_cast<std::size_t>(n_steps) + 1; }
    std::vector<double> times() const;
};

struct TimeSeries {
    TimeGrid grid;
    std::vector<double> values;

    TimeSeries() = default;
    TimeSeries(TimeGrid g, std::vector<double> v);

    template <class F>
    static TimeSeries sample(const TimeGrid& g, F&& f) {
        std::vector<double> v(g.size());
        for (int i = 0; i <= g.n_steps; ++i) {
            v[i] = f(g.t(i));
        }
        return TimeSeries(g, std::move(v));
    }
};

struct FractionalOrder {
    double alpha = 0.5;

    FractionalOrder() = default;
    explicit FractionalOrder(double a);

    double rho() const { return 1.0 / (1.0 + alpha); }
    double order() const { return 1.0 + alpha; }
};

/// Product-trapezoid moments of the weight u^{beta-1} on the lag panel
/// [m-1, m], m = 1..n: lo[m] pairs with the node at lag m, hi[m] with lag m-1.
/// Multiply by h^beta / Gamma(beta) to get J^beta weights.
struct LagMoments {
    double beta = 1.0;
    std::vector<double> lo;  // index 0 unused
    std::vector<double> hi;
};

LagMoments lag_moments(double beta, int n);

/// J^beta f at every node by product-trapezoid quadrature of the piecewise-linear f.
TimeSeries rl_integral(const TimeSeries& f, double beta);

/// Caputo derivative of order j+alpha (order in (0,1) or (1,2)): J^{1-alpha} of the
/// (j+1)-th difference quotient. Second differences are one-sided at both ends.
TimeSeries caputo_derivative(const TimeSeries& u, double order);

/// Riemann-Liouville derivative of order j+alpha: (j+1)-th difference of J^{1-alpha} h.
/// First differences are backward (forward at t=0).
TimeSeries rl_derivative(const TimeSeries& h, double order);

/// max over t >= t_min of |caputo(g) - rl_derivative(g_j)|, with g_j = g minus its
/// Taylor jet of degree j at 0 (jet from one-sided differences).
double verify_caputo_rl_relation(const TimeSeries& g, FractionalOrder alpha, int j,
                                 double t_min = 0.1);

/// Builds g = b0 E_{1+a,1}(lambda t^{1+a}) + b1 t E_{1+a,2}(lambda t^{1+a})
///          + int_0^t (t-s)^a E_{1+a,1+a}(lambda (t-s)^{1+a}) f(s) ds
/// and returns max over t >= t_min of |caputo(g) - lambda g - f|.
double verify_ode_solution(FractionalOrder alpha, double lambda, double b0, double b1,
                           const TimeSeries& f, double t_min = 0.1);

/// The g above, sampled on f's grid.
TimeSeries ode_solution(FractionalOrder alpha, double lambda, double b0, double b1,
                        const TimeSeries& f);

}  // namespace fracdiff
