#include "fracdiff/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>

#include "fracdiff/error.hpp"
#include "fracdiff/quadrature.hpp"

namespace fracdiff {

namespace {

constexpr double kPi = 3.14159265358979323846;

// The FFTW planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

SpatialGrid::SpatialGrid(int d, int n, double l) : dim(d), points(n), half_width(l) {
    require(d >= 1 && d <= 3, "SpatialGrid: dim must be 1, 2 or 3");
    require(n >= 16 && (n & (n - 1)) == 0, "SpatialGrid: points must be a power of two >= 16");
    require(l > 0.0 && std::isfinite(l), "SpatialGrid: half_width must be positive");
}

std::size_t SpatialGrid::size() const {
    std::size_t s = 1;
    for (int d = 0; d < dim; ++d) {
        s *= static_cast<std::size_t>(points);
    }
    return s;
}

std::size_t SpatialGrid::spectral_size() const {
    return size() / points * (points / 2 + 1);
}

double SpatialGrid::cell_volume() const { return std::pow(dx(), dim); }

double SpatialGrid::volume() const { return std::pow(2.0 * half_width, dim); }

double SpatialGrid::wavenumber(int k) const { return kPi * k / half_width; }

Field::Field(const SpatialGrid& g) : grid(g), values(g.size(), 0.0) {}

Field::Field(const SpatialGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    require(values.size() == grid.size(), "Field: value count does not match the grid");
}

double lq_norm(const Field& f, double q) {
    if (!(q >= 1.0)) {
        fail(ErrorCode::InvalidExponent, "lq_norm: q must be >= 1");
    }
    if (std::isinf(q)) {
        double m = 0.0;
        for (double v : f.values) {
            m = std::max(m, std::abs(v));
        }
        return m;
    }
    const double cell = f.grid.cell_volume();
    NeumaierSum s;
    if (q == 1.0) {
        for (double v : f.values) {
            s.add(std::abs(v));
        }
        return cell * s.value();
    }
    if (q == 2.0) {
        for (double v : f.values) {
            s.add(v * v);
        }
        return std::sqrt(cell * s.value());
    }
    // Scale by the max to keep |v|^q representable for large q.
    double m = 0.0;
    for (double v : f.values) {
        m = std::max(m, std::abs(v));
    }
    if (m == 0.0) {
        return 0.0;
    }
    for (double v : f.values) {
        s.add(std::pow(std::abs(v) / m, q));
    }
    return m * std::pow(cell * s.value(), 1.0 / q);
}

Field magnitude(const std::vector<Field>& components) {
    require(!components.empty(), "magnitude: no components");
    Field out(components.front().grid);
    for (const Field& c : components) {
        require(c.grid == out.grid, "magnitude: components live on different grids");
        for (std::size_t i = 0; i < c.values.size(); ++i) {
            out.values[i] += c.values[i] * c.values[i];
        }
    }
    for (double& v : out.values) {
        v = std::sqrt(v);
    }
    return out;
}

// ---------------------------------------------------------------------------

SpectralLayout::SpectralLayout(const SpatialGrid& grid) : grid_(grid) {
    const std::size_t n = grid.spectral_size();
    std::vector<std::int64_t> k2(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
        const auto k = wave_index(idx);
        std::int64_t s = 0;
        for (int d = 0; d < grid.dim; ++d) {
            s += static_cast<std::int64_t>(k[d]) * k[d];
        }
        k2[idx] = s;
    }
    shells_ = k2;
    std::sort(shells_.begin(), shells_.end());
    shells_.erase(std::unique(shells_.begin(), shells_.end()), shells_.end());
    shell_of_.resize(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
        shell_of_[idx] = static_cast<std::uint32_t>(
            std::lower_bound(shells_.begin(), shells_.end(), k2[idx]) - shells_.begin());
    }
}

std::array<int, 3> SpectralLayout::wave_index(std::size_t idx) const {
    const int n = grid_.points;
    const int half = n / 2 + 1;
    std::array<int, 3> k{0, 0, 0};
    // Last axis is the halved one.
    k[grid_.dim - 1] = static_cast<int>(idx % half);
    std::size_t r = idx / half;
    for (int d = grid_.dim - 2; d >= 0; --d) {
        const int i = static_cast<int>(r % n);
        k[d] = i < n / 2 ? i : i - n;
        r /= n;
    }
    if (k[grid_.dim - 1] == n / 2) {
        k[grid_.dim - 1] = -n / 2;
    }
    return k;
}

double SpectralLayout::centring_sign(std::size_t idx) const {
    const auto k = wave_index(idx);
    int s = 0;
    for (int d = 0; d < grid_.dim; ++d) {
        s += k[d];
    }
    return (s % 2 == 0) ? 1.0 : -1.0;
}

double SpectralLayout::xi_squared(std::uint32_t shell) const {
    const double unit = kPi / grid_.half_width;
    return unit * unit * static_cast<double>(shells_[shell]);
}

// ---------------------------------------------------------------------------

struct FftPlan::Impl {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    std::size_t n_real = 0;
    std::size_t n_spec = 0;

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (real) fftw_free(real);
        if (spec) fftw_free(spec);
    }
};

FftPlan::FftPlan(const SpatialGrid& grid) : grid_(grid), impl_(std::make_unique<Impl>()) {
    impl_->n_real = grid.size();
    impl_->n_spec = grid.spectral_size();
    int dims[3] = {grid.points, grid.points, grid.points};
    std::lock_guard<std::mutex> lock(planner_mutex());
    impl_->real = fftw_alloc_real(impl_->n_real);
    impl_->spec = fftw_alloc_complex(impl_->n_spec);
    if (!impl_->real || !impl_->spec) {
        fail(ErrorCode::Internal, "FftPlan: allocation failed");
    }
    impl_->fwd = fftw_plan_dft_r2c(grid.dim, dims, impl_->real, impl_->spec, FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_c2r(grid.dim, dims, impl_->spec, impl_->real, FFTW_ESTIMATE);
    if (!impl_->fwd || !impl_->bwd) {
        fail(ErrorCode::Internal, "FftPlan: FFTW could not build a plan");
    }
}

FftPlan::~FftPlan() = default;

Spectrum FftPlan::forward(const std::vector<double>& values) {
    require(values.size() == impl_->n_real, "FftPlan::forward: size mismatch");
    std::memcpy(impl_->real, values.data(), impl_->n_real * sizeof(double));
    fftw_execute(impl_->fwd);
    Spectrum out(impl_->n_spec);
    std::memcpy(static_cast<void*>(out.data()), impl_->spec, impl_->n_spec * sizeof(fftw_complex));
    return out;
}

std::vector<double> FftPlan::inverse_raw(const Spectrum& spectrum) {
    require(spectrum.size() == impl_->n_spec, "FftPlan::inverse: size mismatch");
    // c2r overwrites its input, hence the copy into the plan's buffer.
    std::memcpy(static_cast<void*>(impl_->spec), spectrum.data(),
                impl_->n_spec * sizeof(fftw_complex));
    fftw_execute(impl_->bwd);
    return std::vector<double>(impl_->real, impl_->real + impl_->n_real);
}

std::vector<double> FftPlan::inverse(const Spectrum& spectrum) {
    std::vector<double> out = inverse_raw(spectrum);
    const double scale = 1.0 / static_cast<double>(impl_->n_real);
    for (double& v : out) {
        v *= scale;
    }
    return out;
}

}  // namespace fracdiff
