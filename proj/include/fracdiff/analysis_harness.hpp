#pragma once

#include <string>
#include <vector>

#include "fracdiff/cauchy_solver.hpp"
#include "fracdiff/field.hpp"

namespace fracdiff {

/// Critical exponents of d_t^{1+alpha}u - Delta u = |u|^p. Entries are +inf when
/// the defining denominator is <= 0. alpha may be taken in [0, 1] for limits.
struct CriticalExponents {
    int n = 1;
    double alpha = 0.5;
    double p_bar = 0.0;          // 1 + 2/(n - 2/(1+alpha))
    double p_tilde = 0.0;        // 1 + 2/(n - 2 + 2/(1+alpha))
    double p_hat = 0.0;          // 1 + 2(1+alpha)/(n - 2 alpha)
    double p_memory_crit = 0.0;  // max(p_hat, 1/(1-alpha))
};

CriticalExponents critical_exponents(int n, double alpha);
double p_bar(double n, double alpha);
double p_tilde(double n, double alpha);
double p_hat(double n, double alpha);  // n real: p_tilde(n, a) = p_hat(n(1+a), a)

/// q_sc = (n(p-1)/2)(1+alpha)/(p+alpha).
double q_scaling(int n, double alpha, double p);
/// The p with q_scaling(n, alpha, p) = q (closed form; +inf when none exists).
double q_scaling_inverse(int n, double alpha, double q);

struct BetaQ {
    double value = 0.0;
    bool untruncated = true;  // the min is attained by (n/2)(1+alpha)(1-1/q) for any small delta
};

/// beta_q = min{(n/2)(1+alpha)(1-1/q), 1+alpha-delta}.
BetaQ beta_q(int n, double alpha, double q, double delta);

enum class DecayCase { HomU0, HomU1, Forced, SemilinearThm10, SemilinearThm00, Gradient };
const char* decay_case_name(DecayCase c);
DecayCase parse_decay_case(const std::string& name);

struct DecayScenario {
    int n = 1;
    double alpha = 0.5;
    double q = 2.0;               // +inf allowed
    DecayCase kind = DecayCase::HomU0;
    double delta = 0.01;          // for beta_q
    double r = 1.0;               // data exponent r_0 / r_1 / r_2
    double eta = 2.0;             // forcing envelope (1+t)^{-eta}
    bool allow_endpoint = false;  // accept equality in the kernel range condition
};

/// Signed exponent of (1+t) predicted for the scenario. Throws InadmissibleScenario
/// when q lies outside the range where the estimate is proved.
double theoretical_decay(const DecayScenario& s);

struct DecayFit {
    double exponent = 0.0;
    double residual = 0.0;  // RMS of log-residuals
    std::size_t points = 0;
};

/// Least-squares slope of log(norm) against log(1+t) over the trailing `window`
/// fraction of the samples. Needs >= 8 points in the window and positive norms.
DecayFit decay_fit(const std::vector<double>& times, const std::vector<double>& norms,
                   double window = 0.6);

/// Majorant branch of int_0^t (t-s)^{-a} (1+s)^{-b} ds, times the frozen constant.
/// b > 1: (1+t)^{-a}; b = 1: (1+t)^{-1} log(1+t); b < 1: (1+t)^{1-a-b}.
double integral_bound(double a, double b, double t);
/// Same branches without the constant.
double integral_bound_shape(double a, double b, double t);

/// Majorant of int_0^t k(t,s) ds for k <= min of the two envelopes:
/// (1+t)^{1-a1-b1} + {(1+t)^{-a0} | (1+t)^{-a0} log(1+t) | (1+t)^{1-a0-b0}} by b0.
double integral_bound_extended(double a0, double b0, double a1, double b1, double t);
double integral_bound_extended_shape(double a0, double b0, double a1, double b1, double t);

/// Quadrature of the left-hand sides.
double envelope_integral(double a, double b, double t);
double envelope_integral_extended(double a0, double b0, double a1, double b1, double t);

/// Frozen constants, one per branch (b>1, b=1, b<1).
struct BoundConstants {
    double above_one;
    double at_one;
    double below_one;
};
BoundConstants integral_bound_constants();
BoundConstants integral_bound_extended_constants();

/// One (a, b, t) sample (a0, b0, a1, b1 for the two-envelope bound).
struct BoundSample {
    double a0, b0, a1, b1, t;
    int branch;  // 0: b>1, 1: b=1, 2: b<1
};
/// Corpus the frozen constants were calibrated on.
inline constexpr unsigned kBoundCalibrationSeed = 20240601;
inline constexpr int kBoundCorpusSize = 50;

/// Fixed-seed corpus of `count` samples spread over the three branches.
std::vector<BoundSample> bound_corpus(unsigned seed, int count, bool extended);

enum class XNormVariant { Thm00, Thm10 };

/// sup_t (1+t)^{-w}{||u||_1 + (1+t)^{(n/2)(1+alpha)(1-1/p)} ||u||_p} with w = alpha
/// (Thm00) or 1 (Thm10), over the trajectory's instants.
double x_norm(const Trajectory& trajectory, XNormVariant variant, double p, double alpha);

/// Spatial data profiles by name.
struct Profile {
    std::string shape = "gaussian";  // gaussian | bump | mode
    double amplitude = 1.0;
    double width = 1.0;              // gaussian: e^{-|x|^2/width^2}; bump: support radius
    int mode = 1;                    // mode: cos(xi_mode x_1)
};
Field make_profile(const Profile& p, const SpatialGrid& grid);

/// A fully specified decay experiment.
struct ScenarioConfig {
    std::string name = "scenario";
    DecayScenario scenario;
    SpatialGrid grid{1, 1024, 256.0};
    double h = 0.05;
    double t_fit_lo = 10.0;
    double t_fit_hi = 100.0;
    int instants = 24;
    double window = 0.6;
    double tolerance = 0.05;
    double power = 2.0;   // semilinear cases
    Profile data;         // u0 (and u1 for thm10), or u1 for hom_u1, or f's spatial factor
    int picard_sweeps = 1;
};

struct DecayReport {
    ScenarioConfig config;
    std::vector<double> times;
    std::vector<double> norms;
    std::vector<double> nonlinear_norms;  // semilinear only
    SolveStatus status = SolveStatus::Completed;
    double blowup_time = 0.0;
    double fitted_exponent = 0.0;
    double fit_residual = 0.0;
    double theoretical_exponent = 0.0;
    double nonlinear_exponent = 0.0;  // fit of the Duhamel part (semilinear only)
    bool pass = false;
    std::string note;
};

DecayReport run_decay_scenario(const ScenarioConfig& config);

/// Pointwise gradient components via the spectrum (Nyquist column dropped).
std::vector<Field> spectral_gradient(const Field& f);

}  // namespace fracdiff
