#include "fracwest/fracquad.hpp"

#include "fracwest/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace fracwest {

FracWeights FracWeights::build(const TimeGrid& grid, double beta) {
    if (!(beta > 0.0) || !(beta <= 1.0))
        throw std::invalid_argument("FracWeights: beta must lie in (0,1]");
    if (grid.n_steps <= 0 || !(grid.dt > 0.0))
        throw std::invalid_argument("FracWeights: invalid time grid");

    FracWeights w;
    w.grid_ = grid;
    w.beta_ = beta;

    const int ns = grid.n_steps;
    w.offset_.resize(ns + 1);
    std::size_t total = 0;
    for (int n = 0; n <= ns; ++n) {
        w.offset_[n] = total;
        total += n + 1;
    }
    w.rows_.resize(total);

    // Integrating the kernel against the piecewise-linear interpolant of v
    // gives  (I^beta v)(t_n) ~ dt^beta/Gamma(beta+2) sum_k c_{n,k} v_k with
    //   c_{n,n} = 1
    //   c_{n,k} = (n-k+1)^{b1} - 2(n-k)^{b1} + (n-k-1)^{b1},  1 <= k <= n-1
    //   c_{n,0} = (n-1)^{b1} - n^beta (n - b1),               b1 = beta + 1.
    const double b1 = beta + 1.0;
    const double scale = std::pow(grid.dt, beta) / std::tgamma(beta + 2.0);
    for (int n = 0; n <= ns; ++n) {
        double* r = w.rows_.data() + w.offset_[n];
        if (n == 0) {
            r[0] = 0.0;
            continue;
        }
        r[0] = scale * (std::pow(n - 1.0, b1) - std::pow(double(n), beta) * (n - b1));
        for (int k = 1; k < n; ++k) {
            const double d = n - k;
            r[k] = scale * (std::pow(d + 1.0, b1) - 2.0 * std::pow(d, b1) + std::pow(d - 1.0, b1));
        }
        r[n] = scale;
    }
    return w;
}

double FracWeights::apply_history(std::span<const double> samples, int n) const {
    if (n < 0 || n > grid_.n_steps)
        throw std::out_of_range("FracWeights::apply_history: step index out of range");
    if (n == 0) return 0.0;
    if (static_cast<int>(samples.size()) < n)
        throw std::out_of_range("FracWeights::apply_history: not enough samples");
    return kernels::dot(rows_.data() + offset_[n], samples.data(), static_cast<std::size_t>(n));
}

double FracWeights::implicit_weight(int n) const {
    if (n < 0 || n > grid_.n_steps)
        throw std::out_of_range("FracWeights::implicit_weight: step index out of range");
    if (n == 0) return 0.0;
    return rows_[offset_[n] + n];
}

std::span<const double> FracWeights::row(int n) const {
    if (n < 0 || n > grid_.n_steps) throw std::out_of_range("FracWeights::row");
    return {rows_.data() + offset_[n], static_cast<std::size_t>(n + 1)};
}

double apply_full(const FracWeights& w, std::span<const double> samples, int n) {
    if (static_cast<int>(samples.size()) < n + 1)
        throw std::out_of_range("apply_full: not enough samples");
    return w.apply_history(samples, n) + w.implicit_weight(n) * samples[n];
}

} // namespace fracwest
