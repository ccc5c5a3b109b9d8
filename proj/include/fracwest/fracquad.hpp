#pragma once

#include <span>
#include <vector>

// Product-trapezoidal discretization of the Abel fractional integral
//   (I^beta v)(t) = 1/Gamma(beta) int_0^t (t-s)^{beta-1} v(s) ds
// on a uniform time grid, stored as lower-triangular convolution weights.
// beta = 1 reduces to the composite trapezoid rule, so the plain integral
// shares the same code path.

namespace fracwest {

struct TimeGrid {
    int n_steps;
    double dt;

    double t(int n) const { return n * dt; }
    double horizon() const { return n_steps * dt; }
};

class FracWeights {
public:
    /// Throws unless 0 < beta <= 1.
    static FracWeights build(const TimeGrid& grid, double beta);

    /// w_{n,k}; valid for 0 <= k <= n <= n_steps.
    double weight(int n, int k) const { return rows_[offset_[n] + k]; }

    /// Explicit part sum_{k<n} w_{n,k} v(t_k). samples must hold at least n
    /// entries; n = 0 returns 0.
    double apply_history(std::span<const double> samples, int n) const;

    /// Implicit coefficient w_{n,n} (constant in n for n >= 1).
    double implicit_weight(int n) const;

    /// Row n as a contiguous span of n+1 weights.
    std::span<const double> row(int n) const;

    double beta() const { return beta_; }
    int n_steps() const { return grid_.n_steps; }
    const TimeGrid& grid() const { return grid_; }

private:
    TimeGrid grid_{};
    double beta_ = 0.0;
    std::vector<double> rows_;     // rows flattened, row n at offset_[n]
    std::vector<std::size_t> offset_;
};

/// Full convolution sum_{k<=n} w_{n,k} v(t_k) (history plus implicit term).
double apply_full(const FracWeights& w, std::span<const double> samples, int n);

} // namespace fracwest
