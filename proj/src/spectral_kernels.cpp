#include "fracdiff/spectral_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracdiff/error.hpp"
#include "fracdiff/quadrature.hpp"
#include "fracdiff/special_functions.hpp"

namespace fracdiff {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double beta_value(BetaIndex b, double alpha) {
    switch (b) {
        case BetaIndex::Zero: return 0.0;
        case BetaIndex::Alpha: return alpha;
        case BetaIndex::One: return 1.0;
        case BetaIndex::OnePlusAlpha: return 1.0 + alpha;
        case BetaIndex::Two: return 2.0;
    }
    fail(ErrorCode::Internal, "beta_value: unknown index");
}

const char* beta_index_name(BetaIndex b) {
    switch (b) {
        case BetaIndex::Zero: return "0";
        case BetaIndex::Alpha: return "alpha";
        case BetaIndex::One: return "1";
        case BetaIndex::OnePlusAlpha: return "1+alpha";
        case BetaIndex::Two: return "2";
    }
    return "?";
}

BetaIndex parse_beta_index(const std::string& name) {
    if (name == "0") return BetaIndex::Zero;
    if (name == "alpha") return BetaIndex::Alpha;
    if (name == "1") return BetaIndex::One;
    if (name == "1+alpha") return BetaIndex::OnePlusAlpha;
    if (name == "2") return BetaIndex::Two;
    fail(ErrorCode::InvalidArgument,
         "unknown beta index '" + name + "' (expected 0, alpha, 1, 1+alpha or 2)");
}

std::vector<double> shell_values(const SpectralLayout& layout,
                                 const std::function<double(double)>& f) {
    const auto& shells = layout.shells();
    std::vector<double> out(shells.size());
    for (std::uint32_t s = 0; s < shells.size(); ++s) {
        out[s] = f(layout.xi_squared(s));
    }
    return out;
}

std::vector<Field> kernel_from_shells(const SpectralLayout& layout, FftPlan& fft,
                                      const std::vector<double>& shell_multiplier, bool gradient) {
    const SpatialGrid& grid = layout.grid();
    const double norm = 1.0 / grid.volume();
    const int components = gradient ? grid.dim : 1;
    std::vector<Field> out;
    out.reserve(components);
    for (int c = 0; c < components; ++c) {
        Spectrum spec(layout.size());
        for (std::size_t idx = 0; idx < spec.size(); ++idx) {
            const double m =
                shell_multiplier[layout.shell_of(idx)] * layout.centring_sign(idx) * norm;
            if (!gradient) {
                spec[idx] = {m, 0.0};
                continue;
            }
            const int k = layout.wave_index(idx)[c];
            // The Nyquist column has no odd counterpart on the grid.
            const double xi = (k == -grid.points / 2) ? 0.0 : grid.wavenumber(k);
            spec[idx] = {0.0, m * xi};
        }
        out.emplace_back(grid, fft.inverse_raw(spec));
    }
    return out;
}

double kernel_multiplier(const KernelSpec& spec, double xi2) {
    const double a = spec.alpha.order();
    const double beta = beta_value(spec.beta, spec.alpha.alpha);
    const double x = std::pow(spec.t, a) * std::pow(xi2, spec.laplacian_power);
    return eval_ml(a, beta, x);
}

namespace {

void validate(const KernelSpec& spec) {
    require(spec.t > 0.0 && std::isfinite(spec.t), "build_kernel: t must be positive");
    require(spec.laplacian_power >= 1.0, "build_kernel: laplacian_power must be >= 1");
}

}  // namespace

std::vector<Field> build_kernel(const KernelSpec& spec, const SpatialGrid& grid) {
    validate(spec);
    SpectralLayout layout(grid);
    FftPlan fft(grid);
    const auto m = shell_values(layout, [&](double xi2) { return kernel_multiplier(spec, xi2); });
    return kernel_from_shells(layout, fft, m, spec.gradient);
}

Field build_scalar_kernel(const KernelSpec& spec, const SpatialGrid& grid) {
    KernelSpec s = spec;
    s.gradient = false;
    return std::move(build_kernel(s, grid).front());
}

double aux_multiplier(const AuxKernelSpec& spec, double xi2) {
    const double rho = spec.alpha.rho();
    const double r = std::sqrt(xi2);
    if (r == 0.0 && spec.d < 0.0) {
        return 0.0;  // the constant mode is dropped for Riesz-type singularities
    }
    const double power = spec.d == 0.0 ? 1.0 : std::pow(r, spec.d);
    const double z = std::pow(r, 2.0 * rho);
    if (spec.family == AuxFamily::H) {
        return power * std::exp(-spec.s * z);
    }
    return power * std::exp(z * std::cos(kPi * rho)) * std::cos(z * std::sin(kPi * rho));
}

Field build_aux_kernel(const AuxKernelSpec& spec, const SpatialGrid& grid) {
    require(spec.d > -grid.dim, "build_aux_kernel: d must exceed -dim");
    if (spec.family == AuxFamily::H) {
        require(spec.s > 0.0, "build_aux_kernel: s must be positive");
    }
    SpectralLayout layout(grid);
    FftPlan fft(grid);
    const auto m = shell_values(layout, [&](double xi2) { return aux_multiplier(spec, xi2); });
    return std::move(kernel_from_shells(layout, fft, m, false).front());
}

double multiplier_l1_bound(const SpatialGrid& grid, const std::function<double(double)>& m) {
    SpectralLayout layout(grid);
    const auto values = shell_values(layout, m);
    const int last_nyquist = -grid.points / 2;
    NeumaierSum s;
    for (std::size_t idx = 0; idx < layout.size(); ++idx) {
        const int k_last = layout.wave_index(idx)[grid.dim - 1];
        // Interior columns of the halved axis stand for two modes.
        const double weight = (k_last == 0 || k_last == last_nyquist) ? 1.0 : 2.0;
        s.add(weight * std::abs(values[layout.shell_of(idx)]));
    }
    return s.value() / grid.volume();
}

KernelDecomposition assemble_kernel_decomposition(FractionalOrder alpha, const SpatialGrid& grid) {
    const double rho = alpha.rho();
    const double inv_rho = 1.0 / rho;
    const double c = std::cos(kPi * inv_rho);
    const double prefactor = std::sin(kPi * (1.0 - inv_rho)) / kPi;

    // Trapezoid in u = log s. The integrand is analytic in a strip of half-width
    // pi(2 rho - 1) around the real axis, so the step is tied to that width.
    const double strip = kPi * (2.0 * rho - 1.0);
    const double du = std::min(0.05, strip / 8.0);
    const double u_max = 40.0;  // integrand ~ e^{-|u|/rho} at both ends
    const int nodes = static_cast<int>(std::ceil(2.0 * u_max / du));
    std::vector<double> s_nodes(nodes + 1);
    std::vector<double> weights(nodes + 1);
    for (int i = 0; i <= nodes; ++i) {
        const double u = -u_max + 2.0 * u_max * i / nodes;
        const double s = std::exp(u);
        const double p = std::pow(s, inv_rho);
        const double denom = (p + c) * (p + c) + (1.0 - c * c);
        const double w = (i == 0 || i == nodes) ? 0.5 : 1.0;
        s_nodes[i] = s;
        weights[i] = w * (2.0 * u_max / nodes) * p / denom;  // s^{1/rho - 1} ds = s^{1/rho} du
    }

    SpectralLayout layout(grid);
    FftPlan fft(grid);
    const AuxKernelSpec k_spec{alpha, 0.0, AuxFamily::K, 1.0};
    const auto assembled_m = shell_values(layout, [&](double xi2) {
        const double z = std::pow(xi2, rho);
        NeumaierSum sum;
        for (std::size_t i = 0; i < s_nodes.size(); ++i) {
            const double e = std::exp(-s_nodes[i] * z);
            if (s_nodes[i] * z > 800.0) {
                break;
            }
            sum.add(weights[i] * e);
        }
        return 2.0 * rho * aux_multiplier(k_spec, xi2) + prefactor * sum.value();
    });
    KernelSpec g_spec;
    g_spec.alpha = alpha;
    g_spec.beta = BetaIndex::One;
    g_spec.t = 1.0;
    const auto direct_m =
        shell_values(layout, [&](double xi2) { return kernel_multiplier(g_spec, xi2); });

    KernelDecomposition out;
    out.assembled = std::move(kernel_from_shells(layout, fft, assembled_m, false).front());
    out.direct = std::move(kernel_from_shells(layout, fft, direct_m, false).front());

    const int n = grid.points;
    double worst = 0.0;
    double peak = 0.0;
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        std::size_t r = idx;
        bool bulk = true;
        for (int d = 0; d < grid.dim; ++d) {
            const double x = grid.coordinate(static_cast<int>(r % n));
            bulk = bulk && std::abs(x) <= 0.5 * grid.half_width;
            r /= n;
        }
        if (!bulk) {
            continue;
        }
        worst = std::max(worst, std::abs(out.assembled.values[idx] - out.direct.values[idx]));
        peak = std::max(peak, std::abs(out.direct.values[idx]));
    }
    out.max_rel_err = peak > 0.0 ? worst / peak : worst;
    return out;
}

double kernel_lq_norm(const Field& f, double q) { return lq_norm(f, q); }

double scaling_check(FractionalOrder alpha, BetaIndex beta, double p, double t1, double t2,
                     const SpatialGrid& grid) {
    require(t1 > 0.0 && t2 > 0.0, "scaling_check: times must be positive");
    if (!(p >= 1.0)) {
        fail(ErrorCode::InvalidExponent, "scaling_check: p must be >= 1");
    }
    KernelSpec spec;
    spec.alpha = alpha;
    spec.beta = beta;
    spec.t = t1;
    const double n1 = lq_norm(build_scalar_kernel(spec, grid), p);
    spec.t = t2;
    const double n2 = lq_norm(build_scalar_kernel(spec, grid), p);
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    const double exponent = -0.5 * grid.dim * alpha.order() * (1.0 - inv_p);
    const double predicted = std::pow(t1 / t2, exponent);
    return std::abs(n1 / n2 - predicted) / predicted;
}

LpRange lp_admissible_range(int n, BetaIndex beta) {
    require(n >= 1, "lp_admissible_range: n must be >= 1");
    LpRange r;
    // The bound follows the first non-vanishing algebraic term |xi|^{-2k} of the
    // multiplier's large-|xi| expansion: k = 2 exactly when 1/Gamma(beta - (1+alpha)) = 0.
    r.bound = (beta == BetaIndex::OnePlusAlpha || beta == BetaIndex::Alpha) ? 2.0 : 1.0;
    const double x = 2.0 * r.bound / n;  // 1 - 1/p_max
    r.p_max = x < 1.0 ? 1.0 / (1.0 - x) : std::numeric_limits<double>::infinity();
    return r;
}

}  // namespace fracdiff
