#include <doctest.h>

#include <cmath>
#include <limits>

#include "fracdiff/error.hpp"
#include "fracdiff/field.hpp"
#include "fracdiff/spectral_kernels.hpp"

using namespace fracdiff;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mass(const Field& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return s * f.grid.cell_volume();
}

// Value at the node nearest to x on the first axis (1-D grids).
double at(const Field& f, double x) {
    const int i = static_cast<int>(std::lround((x + f.grid.half_width) / f.grid.dx()));
    return f.values[i];
}

KernelSpec spec(double alpha, BetaIndex beta, double t) {
    KernelSpec s;
    s.alpha = FractionalOrder(alpha);
    s.beta = beta;
    s.t = t;
    return s;
}

}  // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(SpatialGrid(4, 64, 1.0), Error);
    CHECK_THROWS_AS(SpatialGrid(1, 100, 1.0), Error);
    CHECK_THROWS_AS(SpatialGrid(1, 8, 1.0), Error);
    CHECK_THROWS_AS(SpatialGrid(1, 64, 0.0), Error);
    const SpatialGrid g(2, 32, 4.0);
    CHECK(g.size() == 1024);
    CHECK(g.spectral_size() == 32 * 17);
    CHECK(g.coordinate(16) == 0.0);
}

TEST_CASE("lq norms") {
    const SpatialGrid g(1, 64, 1.0);
    const Field one = Field::sample(g, [](const auto&) { return 1.0; });
    CHECK(lq_norm(one, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    const Field zero(g);
    for (double q : {1.0, 2.0, 3.5, kInf}) CHECK(lq_norm(zero, q) == 0.0);

    const SpatialGrid wide(1, 1024, 20.0);
    const Field gauss = Field::sample(wide, [](const auto& x) { return std::exp(-x[0] * x[0]); });
    CHECK(lq_norm(gauss, 2.0) == doctest::Approx(std::sqrt(std::sqrt(M_PI / 2.0))).epsilon(1e-12));
    CHECK(lq_norm(gauss, kInf) == 1.0);
    try {
        lq_norm(gauss, 0.5);
        FAIL("expected InvalidExponent");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidExponent);
    }
}

TEST_CASE("fft round trip") {
    const SpatialGrid g(3, 16, 2.0);
    const Field f = Field::sample(g, [](const auto& x) { return std::sin(x[0]) + x[1] * x[2]; });
    FftPlan plan(g);
    const auto back = plan.inverse(plan.forward(f.values));
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == doctest::Approx(f.values[i]).epsilon(1e-12));
}

TEST_CASE("kernel mass is the zero-mode multiplier") {
    for (int dim : {1, 2, 3}) {
        const SpatialGrid g(dim, dim == 3 ? 32 : 128, 20.0);
        for (double alpha : {0.3, 0.5, 0.9}) {
            CHECK(mass(build_scalar_kernel(spec(alpha, BetaIndex::One, 1.3), g)) ==
                  doctest::Approx(1.0).epsilon(1e-12));
            CHECK(mass(build_scalar_kernel(spec(alpha, BetaIndex::Two, 0.7), g)) ==
                  doctest::Approx(1.0).epsilon(1e-12));
            CHECK(mass(build_scalar_kernel(spec(alpha, BetaIndex::Alpha, 0.7), g)) ==
                  doctest::Approx(1.0 / std::tgamma(alpha)).epsilon(1e-12));
        }
    }
}

TEST_CASE("kernel values against the M-Wright series") {
    // G_{1+alpha,1}(1, x) = M_nu(|x|)/2, nu = (1+alpha)/2; tools/oracles.py.
    const SpatialGrid g(1, 8192, 64.0);
    const Field k5 = build_scalar_kernel(spec(0.5, BetaIndex::One, 1.0), g);
    CHECK(at(k5, 0.5) == doctest::Approx(0.22251242061936835).epsilon(1e-4));
    CHECK(at(k5, 1.5) == doctest::Approx(0.27436893111322817).epsilon(1e-4));
    CHECK(at(k5, 0.0) == doctest::Approx(0.13790783141510466).epsilon(2e-3));
    const Field k9 = build_scalar_kernel(spec(0.9, BetaIndex::One, 1.0), g);
    CHECK(at(k9, 0.5) == doctest::Approx(0.083678219105872232).epsilon(1e-3));
    CHECK(at(k9, 0.0) == doctest::Approx(0.02568042163179191).epsilon(2e-2));
}

TEST_CASE("kernel L1 norm is refinement-stable") {
    const double n1 = lq_norm(build_scalar_kernel(spec(0.5, BetaIndex::One, 1.0), SpatialGrid(1, 1024, 40.0)), 1.0);
    const double n2 = lq_norm(build_scalar_kernel(spec(0.5, BetaIndex::One, 1.0), SpatialGrid(1, 2048, 40.0)), 1.0);
    CHECK(std::abs(n1 - n2) < 1e-2 * n2);
}

TEST_CASE("gradient kernel is odd with zero mass") {
    const SpatialGrid g(1, 256, 20.0);
    KernelSpec s = spec(0.5, BetaIndex::One, 1.0);
    s.gradient = true;
    const auto k = build_kernel(s, g);
    REQUIRE(k.size() == 1);
    CHECK(std::abs(mass(k[0])) < 1e-12);
    for (int i = 1; i < 128; ++i) CHECK(k[0].values[128 + i] == doctest::Approx(-k[0].values[128 - i]).epsilon(1e-9));
}

TEST_CASE("auxiliary kernels") {
    const SpatialGrid g(1, 4096, 200.0);
    AuxKernelSpec h{FractionalOrder(1.0 / 0.75 - 1.0), 0.0, AuxFamily::H, 1.0};
    const Field h1 = build_aux_kernel(h, g);
    const double bound = multiplier_l1_bound(g, [&](double xi2) { return aux_multiplier(h, xi2); });
    CHECK(lq_norm(h1, kInf) <= bound * (1.0 + 1e-12));

    // ||H(s)||_p = s^{-(n/(2 rho))(1-1/p)} ||H(1)||_p for d = 0.
    const double rho = 0.75;
    for (double s : {0.5, 2.0}) {
        AuxKernelSpec hs = h;
        hs.s = s;
        const Field f = build_aux_kernel(hs, g);
        for (double p : {1.0, 2.0, kInf}) {
            const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
            const double predicted = std::pow(s, -(1.0 / (2.0 * rho)) * (1.0 - inv_p)) * lq_norm(h1, p);
            CHECK(lq_norm(f, p) == doctest::Approx(predicted).epsilon(1e-2));
        }
    }
    AuxKernelSpec k{FractionalOrder(1.0 / 0.75 - 1.0), 0.0, AuxFamily::K, 1.0};
    const double k1 = lq_norm(build_aux_kernel(k, SpatialGrid(1, 2048, 100.0)), 1.0);
    const double k2 = lq_norm(build_aux_kernel(k, SpatialGrid(1, 4096, 100.0)), 1.0);
    CHECK(std::isfinite(k1));
    CHECK(std::abs(k1 - k2) < 1e-2 * k2);
}

TEST_CASE("kernel decomposition") {
    for (double alpha : {0.5, 0.9}) {
        const auto d = assemble_kernel_decomposition(FractionalOrder(alpha), SpatialGrid(1, 512, 30.0));
        CAPTURE(alpha);
        CHECK(d.max_rel_err <= 1e-3);
        CHECK(mass(d.assembled) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(mass(d.direct) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("scaling law") {
    CHECK(scaling_check(FractionalOrder(0.5), BetaIndex::One, 2.0, 1.0, 2.0, SpatialGrid(1, 2048, 60.0)) <= 2e-2);
    CHECK(scaling_check(FractionalOrder(0.5), BetaIndex::OnePlusAlpha, kInf, 1.0, 4.0,
                        SpatialGrid(1, 2048, 60.0)) <= 5e-2);
}

TEST_CASE("admissible Lp range") {
    const LpRange a = lp_admissible_range(1, BetaIndex::One);
    CHECK(a.bound == 1.0);
    CHECK(std::isinf(a.p_max));
    const LpRange b = lp_admissible_range(3, BetaIndex::One);
    CHECK(b.p_max == doctest::Approx(3.0));
    const LpRange c = lp_admissible_range(3, BetaIndex::OnePlusAlpha);
    CHECK(c.bound == 2.0);
    CHECK(std::isinf(c.p_max));
    CHECK(lp_admissible_range(3, BetaIndex::Two).p_max == doctest::Approx(3.0));
}

TEST_CASE("beta index names round-trip") {
    for (BetaIndex b : {BetaIndex::Zero, BetaIndex::Alpha, BetaIndex::One, BetaIndex::OnePlusAlpha, BetaIndex::Two}) {
        CHECK(parse_beta_index(beta_index_name(b)) == b);
    }
    CHECK_THROWS_AS(parse_beta_index("3"), Error);
}
