#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fracdiff {

/// Kahan-Neumaier compensated accumulator.
class NeumaierSum {
public:
    void add(double value) noexcept {
        const double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value)) {
            compensation_ += (sum_ - t) + value;
        } else {
            compensation_ += (value - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t intervals = 0;
    bool converged = false;
};

struct QuadratureOptions {
    double rel_tol = 1e-12;
    double abs_tol = 0.0;
    std::size_t max_intervals = 4000;
};

/// Globally adaptive 21-point Gauss-Kronrod integration over the partition
/// given by `breakpoints` (sorted, at least two entries). The interval with
/// the largest error estimate is bisected until the summed error estimate
/// drops below max(abs_tol, rel_tol * |value|) or the interval budget runs
/// out; in the latter case `converged` is false and the caller decides.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> breakpoints,
                                    const QuadratureOptions& options = {});

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options = {});

/// Single 21-point Kronrod panel with the embedded 10-point Gauss error estimate.
QuadratureResult gauss_kronrod21(const std::function<double(double)>& f, double a, double b);

}  // namespace fracdiff
