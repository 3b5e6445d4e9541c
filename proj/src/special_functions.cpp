#include "fracdiff/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fracdiff/error.hpp"
#include "fracdiff/quadrature.hpp"

namespace fracdiff {
namespace {

constexpr double kPi = std::numbers::pi;

// Lanczos approximation, g = 7, nine coefficients.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_series(double x) {
    const double xm1 = x - 1.0;
    double sum = kLanczos[0];
    for (int i = 1; i < 9; ++i) {
        sum += kLanczos[i] / (xm1 + i);
    }
    return sum;
}

// 1/Gamma(x) for x >= 0.5.
double rgamma_positive(double x) {
    if (x > 171.7) {
        return 0.0;
    }
    const double t = x - 0.5 + kLanczosG;
    const double half_power = std::pow(t, -0.5 * (x - 0.5));
    return (half_power * std::exp(t)) * half_power /
           (std::sqrt(2.0 * kPi) * lanczos_series(x));
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && std::floor(x) == x; }

}  // namespace

double sin_pi(double x) {
    if (std::floor(x) == x) {
        return 0.0;
    }
    double r = std::fmod(x, 2.0);
    if (r > 1.0) {
        r -= 2.0;
    } else if (r < -1.0) {
        r += 2.0;
    }
    if (r > 0.5) {
        r = 1.0 - r;
    } else if (r < -0.5) {
        r = -1.0 - r;
    }
    return std::sin(kPi * r);
}

double gamma_reciprocal(double x) {
    if (std::isnan(x)) {
        return x;
    }
    if (is_nonpositive_integer(x)) {
        return 0.0;
    }
    if (x == std::floor(x) && x <= 20.0) {
        // Exact at small positive integers: 1/(x-1)!.
        double f = 1.0;
        for (int k = 2; k < static_cast<int>(x); ++k) f *= k;
        return 1.0 / f;
    }
    if (x >= 0.5) {
        return rgamma_positive(x);
    }
    // Reflection: 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi.
    const double y = 1.0 - x;
    const double s = sin_pi(x);
    if (y < 171.0) {
        return s / (kPi * rgamma_positive(y));
    }
    const double magnitude = std::exp(std::lgamma(y) + std::log(std::abs(s) / kPi));
    return std::copysign(magnitude, s);
}

double eval_ml_series(double a, double beta, double z, double rel_tol) {
    require(a > 0.0 && a <= 2.0, "eval_ml_series: a must lie in (0, 2]");
    require(rel_tol > 0.0, "eval_ml_series: rel_tol must be positive");
    require(std::isfinite(z) && std::isfinite(beta), "eval_ml_series: non-finite input");

    constexpr int kMaxTerms = 20000;
    const double log_abs_z = z == 0.0 ? -std::numeric_limits<double>::infinity()
                                      : std::log(std::abs(z));
    NeumaierSum sum;
    double max_term = 0.0;
    double previous = std::numeric_limits<double>::infinity();
    int quiet = 0;
    for (int k = 0; k < kMaxTerms; ++k) {
        const double arg = a * k + beta;
        double term = 0.0;
        if (k == 0) {
            term = gamma_reciprocal(beta);
        } else if (z == 0.0) {
            term = 0.0;
        } else if (arg > 160.0 || k * log_abs_z > 600.0) {
            // Log domain; arg > 0 here since a > 0 and the direct branch covers small k.
            const double magnitude = std::exp(k * log_abs_z - std::lgamma(arg));
            term = (z < 0.0 && (k % 2 == 1)) ? -magnitude : magnitude;
        } else {
            term = std::pow(z, k) * gamma_reciprocal(arg);
        }
        sum.add(term);
        const double magnitude = std::abs(term);
        max_term = std::max(max_term, magnitude);
        const double partial = std::abs(sum.value());
        if (magnitude <= rel_tol * partial && magnitude <= previous) {
            if (++quiet >= 3) {
                break;
            }
        } else {
            quiet = 0;
        }
        if (k == kMaxTerms - 1) {
            fail(ErrorCode::CancellationLoss,
                 "eval_ml_series: series did not settle within the term budget");
        }
        previous = magnitude;
        if (z == 0.0 && k >= 2) {
            break;
        }
    }
    const double result = sum.value();
    if (max_term > std::abs(result) / rel_tol) {
        fail(ErrorCode::CancellationLoss,
             "eval_ml_series: largest term " + std::to_string(max_term) +
                 " swamps the result " + std::to_string(result));
    }
    return result;
}

int ml_min_order(double rho, double beta) {
    const double bound = rho * beta - 1.0;
    return std::max(0, static_cast<int>(std::ceil(bound - 1e-12)));
}

double ml_remainder_integral(double rho, double beta, int m, int j, double z, double rel_tol) {
    require(rho > 0.5 && rho < 1.0, "ml_remainder_integral: rho must lie in (1/2, 1)");
    require(j == 1 || j == 2, "ml_remainder_integral: j must be 1 or 2");
    require(z >= 0.0 && std::isfinite(z), "ml_remainder_integral: z must be finite and >= 0");

    const double inv_rho = 1.0 / rho;
    const double c = std::cos(kPi * inv_rho);
    const double s2 = 1.0 - c * c;
    const double near_exponent = (m + j) * inv_rho - beta;      // s -> 0
    const double far_exponent = 2.0 * inv_rho - near_exponent - 2.0;  // tau = 1/s -> 0
    require(near_exponent > -1.0, "ml_remainder_integral: integrand not integrable at s = 0");
    if (z == 0.0) {
        require(far_exponent > -1.0,
                "ml_remainder_integral: the z = 0 integral diverges for these indices");
    }

    // Denominator s^{2/rho} + 2 cos(pi/rho) s^{1/rho} + 1 written as (p + c)^2 + sin^2.
    auto denominator = [=](double s) {
        const double p = std::pow(s, inv_rho);
        return (p + c) * (p + c) + s2;
    };

    // On [0,1] the integrand is v^e * rest(v). A negative e is removed by v = w^q,
    // q = 1/(e+1), whose Jacobian cancels the singular power.
    struct Piece {
        double exponent;
        double q;
        bool substituted;
    };
    auto make_piece = [](double e) {
        Piece p{e, 1.0, false};
        // Below -1 the piece is only integrable thanks to exp(-z/tau); evaluate directly.
        if (e < 0.0 && e > -1.0) {
            p.q = 1.0 / (e + 1.0);
            p.substituted = true;
        }
        return p;
    };
    const Piece near = make_piece(near_exponent);
    const Piece far = make_piece(far_exponent);

    auto eval_piece = [&](const Piece& piece, double w, bool reciprocal) {
        double s = w;
        double prefactor = 1.0;
        if (piece.substituted) {
            s = std::pow(w, piece.q);
            prefactor = piece.q;
        } else if (piece.exponent < 0.0) {
            // Only reached for the far piece with z > 0.
            if (w == 0.0) {
                return 0.0;
            }
            return std::exp(piece.exponent * std::log(w) - z / w) / denominator(w);
        } else if (piece.exponent != 0.0) {
            prefactor = w == 0.0 ? 0.0 : std::pow(w, piece.exponent);
        }
        if (s == 0.0) {
            if (reciprocal && z > 0.0) {
                return 0.0;
            }
            return (piece.substituted || piece.exponent == 0.0) ? prefactor : 0.0;
        }
        const double decay = reciprocal ? std::exp(-z / s) : std::exp(-z * s);
        return prefactor * decay / denominator(s);
    };

    // v in [0,1]: near piece in s = v; v in [1,2]: far piece in tau = 2 - v.
    auto integrand = [&](double v) {
        if (v <= 1.0) {
            return eval_piece(near, v, false);
        }
        return eval_piece(far, 2.0 - v, true);
    };

    auto to_w = [](const Piece& piece, double s) {
        return piece.substituted ? std::pow(s, 1.0 / piece.q) : s;
    };

    std::vector<double> breaks{0.0, 1.0, 2.0};
    if (c < 0.0) {
        // Denominator minimum at s^{1/rho} = -c.
        const double peak = std::pow(-c, rho);
        if (peak < 1.0) {
            breaks.push_back(to_w(near, peak));
        } else {
            breaks.push_back(2.0 - to_w(far, 1.0 / peak));
        }
    }
    const int near_levels =
        std::clamp(static_cast<int>(std::ceil(std::log2(std::max(z, 1.0)))) + 8, 6, 60);
    for (int k = 1; k <= near_levels; ++k) {
        breaks.push_back(to_w(near, std::ldexp(1.0, -k)));
    }
    const int far_levels = z == 0.0 ? 40 : 6;
    for (int k = 1; k <= far_levels; ++k) {
        breaks.push_back(2.0 - to_w(far, std::ldexp(1.0, -k)));
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    QuadratureOptions options;
    options.rel_tol = std::max(rel_tol, 1e-14);  // below this the roundoff estimate dominates
    options.abs_tol = 1e-300;
    options.max_intervals = 6000;
    const QuadratureResult r = integrate_adaptive(integrand, breaks, options);
    if (!r.converged || !std::isfinite(r.value)) {
        fail(ErrorCode::QuadratureFailure,
             "ml_remainder_integral: adaptive quadrature missed rel_tol " + std::to_string(rel_tol) +
                 " (estimate " + std::to_string(r.error) + ")");
    }
    return r.value;
}

MLDecomposition eval_ml_asymptotic(const MLQuery& query) {
    require(query.a > 1.0 && query.a < 2.0, "eval_ml_asymptotic: a must lie in (1, 2)");
    require(query.x > 0.0 && std::isfinite(query.x), "eval_ml_asymptotic: x must be positive");
    require(query.rel_tol > 0.0, "eval_ml_asymptotic: rel_tol must be positive");
    const double rho = query.rho();
    const double beta = query.beta;
    const int m = query.m;
    if (m < 0 || m < rho * beta - 1.0 - 1e-12) {
        fail(ErrorCode::InvalidOrder, "eval_ml_asymptotic: order m=" + std::to_string(m) +
                                          " violates m >= rho*beta - 1");
    }

    MLDecomposition d;
    const double z = std::pow(query.x, rho);
    d.z = z;
    const double z_pow = std::pow(z, 1.0 - beta);
    d.oscillatory = 2.0 * rho * z_pow * std::exp(z * std::cos(kPi * rho)) *
                    std::cos(z * std::sin(kPi * rho) - kPi * rho * (beta - 1.0));

    NeumaierSum algebraic;
    for (int k = 1; k <= m; ++k) {
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        algebraic.add(sign * gamma_reciprocal(beta - k / rho) * std::pow(query.x, -k));
    }
    d.algebraic = algebraic.value();

    d.i1 = ml_remainder_integral(rho, beta, m, 1, z, query.rel_tol);
    d.i2 = ml_remainder_integral(rho, beta, m, 2, z, query.rel_tol);
    const double sign_m = (m % 2 == 0) ? 1.0 : -1.0;
    d.remainder = sign_m * z_pow / kPi *
                  (d.i1 * sin_pi(beta - (m + 1) / rho) + d.i2 * sin_pi(beta - m / rho));
    d.total = d.oscillatory + d.algebraic + d.remainder;
    return d;
}

double ml_series_crossover(double a) { return std::pow(8.0, a); }

std::optional<double> eval_ml_certified_tail(double a, double beta, double x, double tol) {
    if (!(a > 1.0 && a < 2.0) || !(x > 0.0)) {
        return std::nullopt;
    }
    const double rho = 1.0 / a;
    const double z = std::pow(x, rho);
    const double log_z = std::log(z);
    const double s2 = std::pow(std::sin(kPi / rho), 2);
    const double oscillatory = 2.0 * rho * std::pow(z, 1.0 - beta) *
                               std::exp(z * std::cos(kPi * rho)) *
                               std::cos(z * std::sin(kPi * rho) - kPi * rho * (beta - 1.0));
    constexpr int kMaxOrder = 40;
    NeumaierSum algebraic;
    int m0 = ml_min_order(rho, beta);
    for (int k = 1; k <= m0; ++k) {
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        algebraic.add(sign * gamma_reciprocal(beta - k / rho) * std::pow(x, -k));
    }
    double previous_bound = std::numeric_limits<double>::infinity();
    for (int m = m0; m <= kMaxOrder; ++m) {
        if (m > m0) {
            const double sign = (m % 2 == 1) ? 1.0 : -1.0;
            algebraic.add(sign * gamma_reciprocal(beta - m / rho) * std::pow(x, -m));
        }
        double bound = 0.0;
        for (int j = 1; j <= 2; ++j) {
            const double g = (m + j) / rho - beta;
            const double coefficient =
                std::abs(sin_pi(beta - (j == 1 ? (m + 1) / rho : m / rho)));
            if (coefficient == 0.0) {
                continue;
            }
            bound += coefficient *
                     std::exp(std::lgamma(g + 1.0) + (1.0 - beta) * log_z - (g + 1.0) * log_z);
        }
        bound /= kPi * s2;
        const double value = oscillatory + algebraic.value();
        if (bound <= tol * std::abs(value)) {
            return value;
        }
        if (bound > previous_bound) {
            break;
        }
        previous_bound = bound;
    }
    return std::nullopt;
}

double eval_ml(double a, double beta, double x, double rel_tol) {
    require(a > 1.0 && a <= 2.0, "eval_ml: a must lie in (1, 2]");
    require(x >= 0.0 && std::isfinite(x), "eval_ml: x must be finite and >= 0");
    if (x == 0.0) {
        return gamma_reciprocal(beta);
    }
    if (a >= 2.0) {
        return eval_ml_series(a, beta, -x, rel_tol);
    }
    if (x <= ml_series_crossover(a)) {
        try {
            return eval_ml_series(a, beta, -x, rel_tol);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::CancellationLoss) {
                throw;
            }
        }
    } else if (auto tail = eval_ml_certified_tail(a, beta, x, 1e-2 * rel_tol)) {
        return *tail;
    }
    MLQuery q;
    q.a = a;
    q.beta = beta;
    q.x = x;
    q.m = ml_min_order(1.0 / a, beta);
    q.rel_tol = rel_tol;
    return eval_ml_asymptotic(q).total;
}

double ml_weighted_derivative(double alpha, double beta, double lambda, double t, int n_der) {
    require(alpha > 0.0 && alpha < 1.0, "ml_weighted_derivative: alpha must lie in (0, 1)");
    require(t > 0.0, "ml_weighted_derivative: t must be positive");
    require(lambda <= 0.0, "ml_weighted_derivative: only lambda <= 0 is supported");
    require(n_der >= 0, "ml_weighted_derivative: derivative order must be >= 0");
    const double x = -lambda * std::pow(t, 1.0 + alpha);
    return std::pow(t, beta - n_der - 1.0) * eval_ml(1.0 + alpha, beta - n_der, x);
}

// ---------------------------------------------------------------------------
// MittagLefflerTable

namespace {

constexpr int kChebDegree = 24;
constexpr int kMaxDepth = 14;

std::vector<double> chebyshev_nodes() {
    std::vector<double> nodes(kChebDegree + 1);
    for (int k = 0; k <= kChebDegree; ++k) {
        nodes[k] = std::cos(kPi * (k + 0.5) / (kChebDegree + 1));
    }
    return nodes;
}

std::vector<double> chebyshev_coefficients(const std::vector<double>& values) {
    const int n = kChebDegree + 1;
    std::vector<double> c(n, 0.0);
    for (int j = 0; j < n; ++j) {
        NeumaierSum s;
        for (int k = 0; k < n; ++k) {
            s.add(values[k] * std::cos(kPi * j * (k + 0.5) / n));
        }
        c[j] = 2.0 * s.value() / n;
    }
    c[0] *= 0.5;
    return c;
}

double clenshaw(const std::vector<double>& c, double u) {
    double b1 = 0.0;
    double b2 = 0.0;
    for (int j = static_cast<int>(c.size()) - 1; j >= 1; --j) {
        const double b0 = 2.0 * u * b1 - b2 + c[j];
        b2 = b1;
        b1 = b0;
    }
    return u * b1 - b2 + c[0];
}

}  // namespace

MittagLefflerTable::MittagLefflerTable(double a, double beta, double tol)
    : a_(a), beta_(beta), tol_(tol), x_tail_(0.0) {
    require(a > 1.0 && a < 2.0, "MittagLefflerTable: a must lie in (1, 2)");
    require(tol > 0.0, "MittagLefflerTable: tol must be positive");
    double x = 2.0 * ml_series_crossover(a);
    while (!eval_ml_certified_tail(a, beta, x, 1e-2 * tol) && x < 1e14) {
        x *= 2.0;
    }
    if (x >= 1e14) {
        fail(ErrorCode::Internal, "MittagLefflerTable: algebraic tail never certified");
    }
    x_tail_ = x;
    build(0.0, 1.0, false, 0);
    const double log_hi = std::log(x_tail_);
    const int pieces = std::max(1, static_cast<int>(std::ceil(log_hi / 0.5)));
    for (int i = 0; i < pieces; ++i) {
        build(log_hi * i / pieces, log_hi * (i + 1) / pieces, true, 0);
    }
}

void MittagLefflerTable::build(double lo, double hi, bool logarithmic, int depth) {
    static const std::vector<double> nodes = chebyshev_nodes();
    std::vector<double> values(nodes.size());
    double scale = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double u = 0.5 * (lo + hi) + 0.5 * (hi - lo) * nodes[k];
        const double x = logarithmic ? std::exp(u) : u;
        values[k] = eval_ml(a_, beta_, x, std::max(0.1 * tol_, 1e-14));
        scale = std::max(scale, std::abs(values[k]));
    }
    std::vector<double> coeffs = chebyshev_coefficients(values);
    const double tail = std::abs(coeffs[kChebDegree]) + std::abs(coeffs[kChebDegree - 1]) +
                        std::abs(coeffs[kChebDegree - 2]);
    if (tail > tol_ * scale && depth < kMaxDepth) {
        const double mid = 0.5 * (lo + hi);
        build(lo, mid, logarithmic, depth + 1);
        build(mid, hi, logarithmic, depth + 1);
        return;
    }
    segments_.push_back({lo, hi, logarithmic, std::move(coeffs)});
}

const MittagLefflerTable::Segment& MittagLefflerTable::find(double x) const {
    // Segments are appended left to right, so upper edges are increasing in x.
    auto upper_x = [](const Segment& s) { return s.logarithmic ? std::exp(s.hi) : s.hi; };
    std::size_t lo = 0;
    std::size_t hi = segments_.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (x <= upper_x(segments_[mid])) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return segments_[lo];
}

double MittagLefflerTable::operator()(double x) const {
    require(x >= 0.0, "MittagLefflerTable: x must be >= 0");
    if (x >= x_tail_) {
        if (auto v = eval_ml_certified_tail(a_, beta_, x, 1e-2 * tol_)) {
            return *v;
        }
        return eval_ml(a_, beta_, x, tol_);
    }
    const Segment& s = find(x);
    const double u = s.logarithmic ? std::log(std::max(x, 1.0)) : x;
    const double t = std::clamp((2.0 * u - (s.lo + s.hi)) / (s.hi - s.lo), -1.0, 1.0);
    return clenshaw(s.coeffs, t);
}

}  // namespace fracdiff
