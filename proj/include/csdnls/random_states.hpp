#pragma once

#include <random>

#include "csdnls/hardy.hpp"

namespace csdnls {

/// Gaussian coefficients on modes 0..support with geometric envelope decay^n,
/// rescaled to the requested L^2 norm. Modes above support stay zero.
template <typename Real, typename Rng>
HardyState<Real> random_state(Index trunc, Index support, Real norm, Rng& rng, Real decay = Real(0.5)) {
    std::normal_distribution<Real> gauss(Real(0), Real(1));
    HardyState<Real> u(trunc);
    Real envelope = 1;
    for (Index n = 0; n <= std::min(support, trunc); ++n) {
        u[n] = envelope * std::complex<Real>(gauss(rng), gauss(rng));
        envelope *= decay;
    }
    const Real current = l2_norm(u);
    if (current > 0) u *= std::complex<Real>(norm / current);
    return u;
}

/// Uniform norm in [0, max_norm) with the shape of random_state.
template <typename Real, typename Rng>
HardyState<Real> random_state_in_ball(Index trunc, Index support, Real max_norm, Rng& rng,
                                      Real decay = Real(0.5)) {
    std::uniform_real_distribution<Real> radius(Real(0), max_norm);
    const Real r = radius(rng);
    return random_state<Real>(trunc, support, r, rng, decay);
}

}  // namespace csdnls
