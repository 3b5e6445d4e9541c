#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace fracdiff {

/// Periodic box [-L, L)^dim with N points per axis; wavenumbers xi = pi k / L.
struct SpatialGrid {
    int dim = 1;
    int points = 256;
    double half_width = 40.0;

    SpatialGrid() = default;
    SpatialGrid(int dim, int points, double half_width);

    std::size_t size() const;
    std::size_t spectral_size() const;  // r2c layout: last axis keeps N/2+1 entries
    double dx() const { return 2.0 * half_width / points; }
    double cell_volume() const;
    double volume() const;
    double coordinate(int i) const { return -half_width + i * dx(); }
    double wavenumber(int k) const;

    bool operator==(const SpatialGrid& o) const {
        return dim == o.dim && points == o.points && half_width == o.half_width;
    }
};

using Spectrum = std::vector<std::complex<double>>;

struct Field {
    SpatialGrid grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const SpatialGrid& g);
    Field(const SpatialGrid& g, std::vector<double> v);

    /// Samples f(x) at every node; x has dim meaningful entries.
    template <class F>
    static Field sample(const SpatialGrid& g, F&& f) {
        Field out(g);
        const int n = g.points;
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
            std::size_t r = idx;
            for (int d = g.dim - 1; d >= 0; --d) {
                x[d] = g.coordinate(static_cast<int>(r % n));
                r /= n;
            }
            out.values[idx] = f(x);
        }
        return out;
    }
};

/// L^q norm with cell-volume weights; q = +inf gives the max modulus.
/// Throws InvalidExponent for q < 1.
double lq_norm(const Field& f, double q);

/// Pointwise Euclidean magnitude of a vector field given by components.
Field magnitude(const std::vector<Field>& components);

/// Per-entry bookkeeping for the r2c spectrum of a grid: signed wave indices,
/// and the shell (distinct integer |k|^2) each entry belongs to.
class SpectralLayout {
public:
    explicit SpectralLayout(const SpatialGrid& grid);

    const SpatialGrid& grid() const { return grid_; }
    std::size_t size() const { return shell_of_.size(); }
    const std::vector<std::int64_t>& shells() const { return shells_; }
    std::uint32_t shell_of(std::size_t idx) const { return shell_of_[idx]; }
    std::array<int, 3> wave_index(std::size_t idx) const;
    /// (-1)^{k_1+...+k_dim}: moves the origin of the box to its centre.
    double centring_sign(std::size_t idx) const;
    /// |xi|^2 for a shell.
    double xi_squared(std::uint32_t shell) const;

private:
    SpatialGrid grid_;
    std::vector<std::int64_t> shells_;
    std::vector<std::uint32_t> shell_of_;
};

/// FFTW-backed real transforms for one grid. Plans are built with FFTW_ESTIMATE
/// so results do not depend on timing. Not safe to share between threads.
class FftPlan {
public:
    explicit FftPlan(const SpatialGrid& grid);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    const SpatialGrid& grid() const { return grid_; }

    /// Unnormalised forward transform.
    Spectrum forward(const std::vector<double>& values);
    /// Inverse transform including the 1/N^dim factor.
    std::vector<double> inverse(const Spectrum& spectrum);
    /// Unnormalised inverse transform (sum of X_k e^{+2 pi i k.j/N}).
    std::vector<double> inverse_raw(const Spectrum& spectrum);

private:
    struct Impl;
    SpatialGrid grid_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace fracdiff
