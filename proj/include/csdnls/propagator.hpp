#pragma once

// Three ways to move data forward in time:
//   ExplicitFlow     resolvent formula through the spectrum of L_{u0}
//   evolve_direct    integrating-factor RK4 on the Galerkin-truncated PDE
//   eigenfunctions   explicit formula for the B-transported Lax eigenbasis

#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "csdnls/hardy.hpp"
#include "csdnls/lax.hpp"
#include "csdnls/transform_product.hpp"

namespace csdnls {

enum class Method { explicit_formula, direct, both };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::explicit_formula: return "explicit";
        case Method::direct: return "direct";
        case Method::both: return "both";
    }
    return "?";
}

struct FlowConfig {
    EquationSign sign = EquationSign::focusing;
    Index N = 32;
    std::vector<double> t_samples;
    double dt = 1e-4;
    Method method = Method::both;
    bool dealias = true;
    double lambda_shift = 0;  // resolved value; see default_lambda_shift

    void validate() const {
        if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
        if (N < 4) throw std::invalid_argument("N must be at least 4");
        for (std::size_t i = 1; i < t_samples.size(); ++i)
            if (t_samples[i] < t_samples[i - 1]) throw std::invalid_argument("t_samples must be sorted");
        if (!t_samples.empty() && t_samples.front() < 0)
            throw std::invalid_argument("t_samples must be nonnegative");
    }
};

/// 2 + |u0|^2: keeps lambda + lambda_0 >= 1 for either sign at any truncation.
template <typename Real>
Real default_lambda_shift(const HardyState<Real>& u0) {
    return Real(2) + l2_norm_sq(u0);
}

/// Focusing data on or outside the unit L^2 sphere lies outside the global theory.
template <typename Real>
bool outside_theorem(const HardyState<Real>& u0, EquationSign sign) {
    return sign == EquationSign::focusing && l2_norm_sq(u0) >= Real(1) - Real(1e-12);
}

template <typename Real>
struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<HardyState<Real>> states;
    Method method = Method::direct;
    std::vector<Real> truncation_loss;  // top-quarter modal mass, max since previous sample
    bool truncation_valid = true;
    std::vector<std::string> tags;
    std::vector<std::string> warnings;
};

/// Sum of |u^(n)|^2 over n > 3N/4.
template <typename Real>
Real top_quarter_mass(const HardyState<Real>& u) {
    const Index N = u.trunc();
    Real acc = 0;
    for (Index n = (3 * N) / 4 + 1; n <= N; ++n) acc += std::norm(u[n]);
    return acc;
}

/// +/- 2i D Pi(|u|^2) u on modes 0..N through O(N^2) convolutions. Reference path.
template <typename Real>
HardyState<Real> rhs_nonlinear_direct(const HardyState<Real>& u, EquationSign sign) {
    // Pi(|u|^2) restricted to 0..N is exactly T_ubar u.
    const HardyState<Real> dpi = derivative(szego_project(modulus_squared(u), u.trunc()));
    return convolve_direct(dpi, u) * std::complex<Real>(0, Real(2 * sign_factor(sign)));
}

/// Grid evaluation of the nonlinear term. With dealias the grid has >= 2N+1
/// points and the result equals rhs_nonlinear_direct to round-off; without,
/// an (N+1)-point grid is used and products alias.
template <typename Real>
HardyState<Real> rhs_nonlinear(const HardyState<Real>& u, EquationSign sign, bool dealias = true) {
    using C = std::complex<Real>;
    const Index N = u.trunc();
    SpectralGrid<Real> grid(dealias ? dealiased_grid_size(N) : N + 1);
    const Index M = grid.points();

    auto v = grid.to_grid(u.coeffs());
    std::vector<C> mod(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) mod[j] = std::norm(v[j]);
    const auto bins = grid.to_bins(mod);

    CVector<Real> dpi = CVector<Real>::Zero(N + 1);
    for (Index n = 1; n <= N; ++n) dpi[n] = Real(n) * bins[n % M];
    auto w = grid.to_grid(dpi);
    for (std::size_t j = 0; j < w.size(); ++j) w[j] *= v[j];
    const auto prod = grid.to_bins(w);

    HardyState<Real> out(N);
    const C scale(0, Real(2 * sign_factor(sign)));
    for (Index n = 0; n <= N; ++n) out[n] = scale * prod[n % M];
    return out;
}

/// Full right-hand side: -i n^2 u^(n) plus the nonlinear term.
template <typename Real>
HardyState<Real> rhs_full(const HardyState<Real>& u, EquationSign sign, bool dealias = true) {
    HardyState<Real> out = rhs_nonlinear(u, sign, dealias);
    for (Index n = 0; n <= u.trunc(); ++n) out[n] += std::complex<Real>(0, -Real(n) * Real(n)) * u[n];
    return out;
}

namespace detail {

template <typename Real>
void require_finite(const HardyState<Real>& u, double t, Real reference_norm) {
    if (!u.coeffs().allFinite()) {
        std::ostringstream msg;
        msg << "direct integrator produced non-finite coefficients at t=" << t;
        throw NumericalFailure(msg.str());
    }
    if (l2_norm(u) > Real(1e6) * (Real(1) + reference_norm)) {
        std::ostringstream msg;
        msg << "direct integrator blow-up detected at t=" << t << " (|u|=" << l2_norm(u) << ")";
        throw NumericalFailure(msg.str());
    }
}

}  // namespace detail

/// One integrating-factor RK4 step of size h for u' = -i n^2 u + F(u).
template <typename Real>
HardyState<Real> ifrk4_step(const HardyState<Real>& u, Real h, EquationSign sign, bool dealias) {
    using C = std::complex<Real>;
    const Index N = u.trunc();
    CVector<Real> half(N + 1);
    for (Index n = 0; n <= N; ++n) half[n] = std::exp(C(0, -Real(n) * Real(n) * h / 2));
    auto phase = [&](const HardyState<Real>& x) {
        return HardyState<Real>(CVector<Real>(half.cwiseProduct(x.coeffs())));
    };

    const HardyState<Real> a = h * rhs_nonlinear(u, sign, dealias);
    const HardyState<Real> Eu = phase(u);
    const HardyState<Real> b = h * rhs_nonlinear(phase(u + C(Real(0.5)) * a), sign, dealias);
    const HardyState<Real> c = h * rhs_nonlinear(Eu + C(Real(0.5)) * b, sign, dealias);
    const HardyState<Real> d = h * rhs_nonlinear(phase(Eu) + phase(c), sign, dealias);

    HardyState<Real> out = phase(phase(u));
    out += C(Real(1) / Real(6)) * (phase(phase(a)) + C(2) * phase(b + c) + d);
    return out;
}

/// Integrate from u0 and record the state at every requested sample time.
/// The last substep before each sample is shortened to land on it exactly.
template <typename Real>
TrajectoryRecord<Real> evolve_direct(const HardyState<Real>& u0, const FlowConfig& cfg) {
    cfg.validate();
    if (u0.trunc() != cfg.N) throw TruncationMismatch(cfg.N, u0.trunc());

    TrajectoryRecord<Real> rec;
    rec.method = Method::direct;
    const Real norm0 = l2_norm(u0);
    if (cfg.dt > 1.0 / double(cfg.N * cfg.N)) {
        std::ostringstream msg;
        msg << "dt=" << cfg.dt << " exceeds 1/N^2=" << 1.0 / double(cfg.N * cfg.N)
            << "; top modes are under-resolved in time";
        rec.warnings.push_back(msg.str());
    }
    if (outside_theorem(u0, cfg.sign)) rec.tags.push_back("outside-theorem");

    HardyState<Real> u = u0;
    double t = 0;
    Real interval_mass = top_quarter_mass(u);
    for (const double ts : cfg.t_samples) {
        const double span = ts - t;
        if (span > 0) {
            const auto steps = static_cast<long>(std::ceil(span / cfg.dt * (1 - 1e-12)));
            const double t_start = t;
            for (long k = 0; k < steps; ++k) {
                const double t_next = (k + 1 == steps) ? ts : t_start + double(k + 1) * cfg.dt;
                u = ifrk4_step(u, Real(t_next - t), cfg.sign, cfg.dealias);
                t = t_next;
                detail::require_finite(u, t, norm0);
                interval_mass = std::max(interval_mass, top_quarter_mass(u));
            }
        }
        rec.times.push_back(ts);
        rec.states.push_back(u);
        rec.truncation_loss.push_back(interval_mass);
        interval_mass = top_quarter_mass(u);
    }
    const Real budget = Real(1e-10) * std::max(l2_norm_sq(u0), Real(1e-300));
    for (Real m : rec.truncation_loss)
        if (m > budget) rec.truncation_valid = false;
    if (!rec.truncation_valid) rec.tags.push_back("truncation-invalid");
    return rec;
}

/// Explicit solution through the spectrum of L_{u0}:
///   u^(t,k) = < M(t)^k u0 | 1 >,   M(t) = e^{-it} e^{-2it L_{u0}} S*.
template <typename Real>
class ExplicitFlow {
public:
    using C = std::complex<Real>;

    ExplicitFlow(HardyState<Real> u0, EquationSign sign)
        : u0_(std::move(u0)), sign_(sign), spec_(lax_spectrum(u0_, sign)) {}

    const Spectrum<Real>& spectrum() const { return spec_; }
    const HardyState<Real>& initial() const { return u0_; }
    EquationSign sign() const { return sign_; }

    HardyState<Real> state_at(Real t) const {
        const Index N = u0_.trunc();
        const CMatrix<Real>& V = spec_.eigenvectors;
        CVector<Real> phase(N + 1);
        for (Index n = 0; n <= N; ++n)
            phase[n] = std::exp(C(0, -t * (Real(1) + Real(2) * spec_.eigenvalues[n])));

        HardyState<Real> out(N);
        CVector<Real> w = u0_.coeffs();
        out[0] = w[0];
        CVector<Real> lowered(N + 1);
        for (Index k = 1; k <= N; ++k) {
            lowered.head(N) = w.tail(N);
            lowered[N] = C(0);
            w = V * phase.cwiseProduct(V.adjoint() * lowered);
            out[k] = w[0];
        }
        if (!out.coeffs().allFinite()) throw NumericalFailure("explicit formula produced non-finite values");
        return out;
    }

    /// f_n^t(k) = < A(t)^k f_n^0 | e^{-itL^2} 1 >,  A(t) = e^{-it(L+1)^2} S* e^{itL^2}.
    std::vector<HardyState<Real>> eigenfunctions_at(Real t, const std::vector<Index>& indices) const {
        const Index N = u0_.trunc();
        for (Index n : indices)
            if (n < 0 || n > N) throw std::out_of_range("eigenfunction index outside 0..N");
        const auto exp_sq = [&](Real shift, Real sgn) {
            return spec_.function_of([&](Real l) { return std::exp(C(0, sgn * t * (l + shift) * (l + shift))); });
        };
        const CMatrix<Real> A = exp_sq(Real(1), Real(-1)) * shift_adjoint_matrix<Real>(N + 1) *
                                exp_sq(Real(0), Real(1));
        const CMatrix<Real> back = exp_sq(Real(0), Real(-1));
        const CVector<Real> g = back.col(0);

        CMatrix<Real> W(N + 1, Index(indices.size()));
        for (std::size_t i = 0; i < indices.size(); ++i) W.col(Index(i)) = spec_.eigenvectors.col(indices[i]);
        CMatrix<Real> coeffs(N + 1, W.cols());
        for (Index k = 0; k <= N; ++k) {
            coeffs.row(k) = g.adjoint() * W;
            if (k < N) W = A * W;
        }
        std::vector<HardyState<Real>> out;
        out.reserve(indices.size());
        for (Index i = 0; i < coeffs.cols(); ++i) out.emplace_back(CVector<Real>(coeffs.col(i)));
        return out;
    }

    TrajectoryRecord<Real> trajectory(const std::vector<double>& times) const {
        TrajectoryRecord<Real> rec;
        rec.method = Method::explicit_formula;
        if (outside_theorem(u0_, sign_)) rec.tags.push_back("outside-theorem");
        for (double t : times) {
            rec.times.push_back(t);
            rec.states.push_back(state_at(Real(t)));
            rec.truncation_loss.push_back(top_quarter_mass(rec.states.back()));
        }
        const Real budget = Real(1e-10) * std::max(l2_norm_sq(u0_), Real(1e-300));
        for (Real m : rec.truncation_loss)
            if (m > budget) rec.truncation_valid = false;
        if (!rec.truncation_valid) rec.tags.push_back("truncation-invalid");
        return rec;
    }

private:
    HardyState<Real> u0_;
    EquationSign sign_;
    Spectrum<Real> spec_;
};

template <typename Real>
HardyState<Real> evolve_explicit(const HardyState<Real>& u0, Real t, EquationSign sign) {
    return ExplicitFlow<Real>(u0, sign).state_at(t);
}

template <typename Real>
std::vector<HardyState<Real>> evolve_eigenfunctions(const HardyState<Real>& u0, Real t, EquationSign sign,
                                                    const std::vector<Index>& indices) {
    return ExplicitFlow<Real>(u0, sign).eigenfunctions_at(t, indices);
}

}  // namespace csdnls
