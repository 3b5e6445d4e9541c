#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fracdiff/field.hpp"
#include "fracdiff/fractional_calculus.hpp"

namespace fracdiff {

/// The second Mittag-Leffler index of a solution kernel, relative to alpha.
enum class BetaIndex { Zero, Alpha, One, OnePlusAlpha, Two };

double beta_value(BetaIndex b, double alpha);
const char* beta_index_name(BetaIndex b);
BetaIndex parse_beta_index(const std::string& name);  // "0", "alpha", "1", "1+alpha", "2"

/// G_{1+alpha,beta}(t, .) = F^{-1} E_{1+alpha,beta}(-t^{1+alpha} |xi|^{2 m_L}),
/// optionally times i xi_j (one field per component).
struct KernelSpec {
    FractionalOrder alpha{0.5};
    BetaIndex beta = BetaIndex::One;
    double t = 1.0;
    double laplacian_power = 1.0;
    bool gradient = false;
};

enum class AuxFamily { K, H };

/// K: |xi|^d e^{|xi|^{2 rho} cos(pi rho)} cos(|xi|^{2 rho} sin(pi rho))
/// H: |xi|^d e^{-s |xi|^{2 rho}}
struct AuxKernelSpec {
    FractionalOrder alpha{0.5};
    double d = 0.0;
    AuxFamily family = AuxFamily::H;
    double s = 1.0;
};

/// Radial multiplier evaluated once per distinct |k|^2 of the grid; f receives |xi|^2.
std::vector<double> shell_values(const SpectralLayout& layout,
                                 const std::function<double(double)>& f);

/// Kernel field(s) for a radial multiplier given per shell. With `gradient`, one field per axis.
std::vector<Field> kernel_from_shells(const SpectralLayout& layout, FftPlan& fft,
                                      const std::vector<double>& shell_multiplier, bool gradient);

std::vector<Field> build_kernel(const KernelSpec& spec, const SpatialGrid& grid);
Field build_scalar_kernel(const KernelSpec& spec, const SpatialGrid& grid);

/// Multiplier of build_kernel as a function of |xi|^2 (no gradient factor).
double kernel_multiplier(const KernelSpec& spec, double xi2);

Field build_aux_kernel(const AuxKernelSpec& spec, const SpatialGrid& grid);
double aux_multiplier(const AuxKernelSpec& spec, double xi2);

/// (2L)^{-n} sum_k |m(xi_k)|: the discrete bound sup|F^{-1} m| <= this.
double multiplier_l1_bound(const SpatialGrid& grid, const std::function<double(double)>& m);

struct KernelDecomposition {
    Field assembled;
    Field direct;
    double max_rel_err = 0.0;  // max |assembled - direct| / max |direct|, over |x_i| <= L/2
};

/// Rebuilds G_{1+alpha,1}(1, .) from 2 rho K_{1/rho,0} plus the s-integral of H_{1/rho,0}(s, .)
/// against s^{1/rho-1}/(s^{2/rho} + 2 cos(pi/rho) s^{1/rho} + 1), and compares with the
/// direct kernel. The s-integral is a trapezoid rule in log s, applied mode by mode.
KernelDecomposition assemble_kernel_decomposition(FractionalOrder alpha, const SpatialGrid& grid);

/// Throws InvalidExponent for q < 1; q = +inf is the max norm.
double kernel_lq_norm(const Field& f, double q);

/// |r_measured - r_predicted| / r_predicted with r = ||G(t1)||_p / ||G(t2)||_p and
/// r_predicted = (t1/t2)^{-(n/2)(1+alpha)(1-1/p)}.
double scaling_check(FractionalOrder alpha, BetaIndex beta, double p, double t1, double t2,
                     const SpatialGrid& grid);

/// Right-hand bound c in n/2 (1 - 1/p) < c for G_{1+alpha,beta}(1,.) in L^p, and the
/// exponent p_max where equality holds (+inf if never).
struct LpRange {
    double bound = 1.0;
    double p_max = 0.0;
};
LpRange lp_admissible_range(int n, BetaIndex beta);

}  // namespace fracdiff
