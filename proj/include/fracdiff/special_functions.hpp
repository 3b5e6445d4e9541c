#pragma once

#include <optional>
#include <vector>

namespace fracdiff {

/// 1/Gamma(x) for any real x. Exactly zero at the non-positive integers.
double gamma_reciprocal(double x);

/// sin(pi x) with exact zeros at the integers.
double sin_pi(double x);

/// Evaluation request for E_{a,beta}(-x).
struct MLQuery {
    double a = 1.5;
    double beta = 1.0;
    double x = 0.0;
    int m = 0;
    double rel_tol = 1e-12;

    double rho() const { return 1.0 / a; }
};

/// Terms of the three-part representation
///   E_{1/rho,beta}(-z^{1/rho}) = oscillatory + algebraic + remainder,
/// with the remainder built from the two Laplace-type integrals i1, i2.
struct MLDecomposition {
    double z = 0.0;
    double oscillatory = 0.0;
    double algebraic = 0.0;
    double remainder = 0.0;
    double i1 = 0.0;
    double i2 = 0.0;
    double total = 0.0;
};

/// Power series sum_k z^k / Gamma(a k + beta) with compensated summation.
/// Throws CancellationLoss when the largest term exceeds |sum| / rel_tol.
double eval_ml_series(double a, double beta, double z, double rel_tol = 1e-14);

/// Smallest admissible asymptotic order m >= rho*beta - 1.
int ml_min_order(double rho, double beta);

/// The Laplace-type integral
///   I_{j,m}(z) = int_0^inf s^{(m+j)/rho - beta} e^{-z s}
///                / (s^{2/rho} + 2 cos(pi/rho) s^{1/rho} + 1) ds,
/// for z >= 0 (z = 0 requires the integral to converge).
double ml_remainder_integral(double rho, double beta, int m, int j, double z,
                             double rel_tol = 1e-13);

MLDecomposition eval_ml_asymptotic(const MLQuery& query);

/// Crossover x* between the series and the decomposition.
double ml_series_crossover(double a);

/// E_{a,beta}(-x) for a in (1, 2], x >= 0.
double eval_ml(double a, double beta, double x, double rel_tol = 1e-13);

/// Truncated algebraic expansion with the remainder certified below
/// tol * |value| through the bound I_{j,m}(z) <= Gamma(g+1) z^{-g-1} / sin^2(pi/rho).
/// Returns nullopt when no order up to the internal cap certifies.
std::optional<double> eval_ml_certified_tail(double a, double beta, double x, double tol);

/// n-th derivative of t -> t^{beta-1} E_{1+alpha,beta}(lambda t^{1+alpha}), i.e.
/// t^{beta-n-1} E_{1+alpha,beta-n}(lambda t^{1+alpha}).
double ml_weighted_derivative(double alpha, double beta, double lambda, double t, int n_der);

/// Piecewise Chebyshev table for x -> E_{a,beta}(-x) on [0, inf).
/// Segments are split until the trailing coefficients fall below
/// tol times the segment's magnitude; beyond the certified-tail threshold
/// the algebraic expansion is used directly.
class MittagLefflerTable {
public:
    MittagLefflerTable(double a, double beta, double tol = 1e-12);

    double operator()(double x) const;

    double a() const { return a_; }
    double beta() const { return beta_; }
    double tail_start() const { return x_tail_; }
    std::size_t segment_count() const { return segments_.size(); }

private:
    struct Segment {
        double lo;  // in x for the first segment, log(x) otherwise
        double hi;
        bool logarithmic;
        std::vector<double> coeffs;
    };

    void build(double lo, double hi, bool logarithmic, int depth);
    const Segment& find(double x) const;

    double a_;
    double beta_;
    double tol_;
    double x_tail_;
    std::vector<Segment> segments_;
};

}  // namespace fracdiff
