#pragma once

// Grid-based products of Hardy states through Eigen's FFT module.
//
// The retained band is 0..N and a product of two band-limited states reaches
// 2N, so an alias-free grid needs at least 2N+1 points. With dealiasing off the
// grid has exactly N+1 points and modes N+1..2N fold back onto 0..N-1.

#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

#include "csdnls/hardy.hpp"

namespace csdnls {

/// Smallest 2^a 3^b 5^c that is >= n.
inline Index fft_size(Index n) {
    Index best = 1;
    while (best < n) best *= 2;
    for (Index p2 = 1; p2 < best; p2 *= 2)
        for (Index p3 = p2; p3 < best; p3 *= 3)
            for (Index p5 = p3; p5 < best; p5 *= 5)
                if (p5 >= n) best = p5;
    return best;
}

inline Index dealiased_grid_size(Index trunc) { return fft_size(2 * trunc + 1); }

namespace detail {

// Plans are cached inside Eigen::FFT; one instance per thread.
template <typename Real>
Eigen::FFT<Real>& thread_fft() {
    thread_local Eigen::FFT<Real> fft;
    return fft;
}

}  // namespace detail

/// Samples of a band-limited function on an M-point uniform grid, plus the
/// transforms back and forth. Coefficient k maps to bin k mod M.
template <typename Real>
class SpectralGrid {
public:
    using Complex = std::complex<Real>;

    explicit SpectralGrid(Index points) : points_(points), spec_(points), phys_(points) {}

    Index points() const { return points_; }

    /// Grid values of sum_n c_n e^{inx} for n = 0..N.
    std::vector<Complex> to_grid(const CVector<Real>& coeffs) {
        std::fill(spec_.begin(), spec_.end(), Complex(0));
        for (Index n = 0; n < coeffs.size(); ++n) spec_[n % points_] += coeffs[n];
        auto& fft = detail::thread_fft<Real>();
        fft.SetFlag(Eigen::FFT<Real>::Unscaled);
        fft.inv(phys_, spec_);
        fft.ClearFlag(Eigen::FFT<Real>::Unscaled);
        return phys_;
    }

    /// Fourier coefficients (bin order) of grid values.
    std::vector<Complex> to_bins(const std::vector<Complex>& values) {
        detail::thread_fft<Real>().fwd(spec_, values);
        const Real scale = Real(1) / Real(points_);
        for (auto& c : spec_) c *= scale;
        return spec_;
    }

    /// Signed frequency of bin k (bins above M/2 are negative frequencies).
    Index frequency(Index bin) const { return bin <= points_ / 2 ? bin : bin - points_; }

private:
    Index points_;
    std::vector<Complex> spec_;
    std::vector<Complex> phys_;
};

/// Product f g truncated to modes 0..N, computed on a grid. With dealias the
/// retained modes equal convolve_direct to round-off.
template <typename Real>
HardyState<Real> pointwise_product(const HardyState<Real>& f, const HardyState<Real>& g,
                                   bool dealias = true) {
    require_same_trunc(f, g);
    const Index N = f.trunc();
    SpectralGrid<Real> grid(dealias ? dealiased_grid_size(N) : N + 1);
    auto fv = grid.to_grid(f.coeffs());
    const auto gv = grid.to_grid(g.coeffs());
    for (std::size_t j = 0; j < fv.size(); ++j) fv[j] *= gv[j];
    const auto bins = grid.to_bins(fv);
    HardyState<Real> out(N);
    for (Index n = 0; n <= N; ++n) out[n] = bins[n % grid.points()];
    return out;
}

/// T_u g through the dealiased grid product.
template <typename Real>
HardyState<Real> toeplitz_apply_transform(const HardyState<Real>& u, const HardyState<Real>& g) {
    return pointwise_product(u, g, true);
}

/// |u|^2 on -N..N from grid samples. Needs an alias-free grid (>= 2N+1 points)
/// for exact coefficients; a coarser grid folds them.
template <typename Real>
FullSymbol<Real> modulus_squared_transform(const HardyState<Real>& u, bool dealias = true) {
    const Index N = u.trunc();
    SpectralGrid<Real> grid(dealias ? dealiased_grid_size(N) : N + 1);
    auto v = grid.to_grid(u.coeffs());
    for (auto& x : v) x = std::norm(x);
    const auto bins = grid.to_bins(v);
    FullSymbol<Real> out(N);
    const Index M = grid.points();
    for (Index n = -N; n <= N; ++n) out.at(n) = bins[((n % M) + M) % M];
    return out;
}

}  // namespace csdnls
