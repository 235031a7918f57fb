#pragma once

// Conserved quantities and invariants evaluated along trajectories.

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "csdnls/hardy.hpp"
#include "csdnls/lax.hpp"
#include "csdnls/propagator.hpp"
#include "csdnls/random_states.hpp"

namespace csdnls {

template <typename Real>
struct DiagnosticsReport {
    std::vector<double> times;
    std::vector<Real> l2_norm;
    std::vector<std::complex<Real>> mean;
    std::map<double, std::vector<Real>> H_s;
    std::vector<Real> eigenvalue_drift;
    CMatrix<Real> birkhoff_coordinates;  // n x time, beta_n(t) = <u(t)|f_n^t>
    RVector<Real> birkhoff_initial_moduli;
    Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> birkhoff_moduli;  // n x time
    std::vector<Real> birkhoff_phase_residual;
    std::map<std::string, Real> identity_residuals;
    std::vector<std::string> tags;
};

/// H_s(u) = <(L_u + lambda)^s u | u> = sum_n (lambda_n + lambda)^s |<u|f_n>|^2.
template <typename Real>
Real conserved_Hs(const HardyState<Real>& u, const Spectrum<Real>& spec, Real s, Real lambda_shift) {
    if (s < 0) throw std::invalid_argument("H_s needs s >= 0");
    if (spec.eigenvalues[0] + lambda_shift <= 0)
        throw NumericalFailure("H_s: lambda_shift + lambda_0 must be positive");
    const CVector<Real> proj = spec.eigenvectors.adjoint() * u.coeffs();
    Real acc = 0;
    for (Index n = 0; n < spec.size(); ++n)
        acc += std::pow(spec.eigenvalues[n] + lambda_shift, s) * std::norm(proj[n]);
    return acc;
}

template <typename Real>
Real conserved_Hs(const HardyState<Real>& u, Real s, Real lambda_shift, EquationSign sign) {
    return conserved_Hs(u, lax_spectrum(u, sign), s, lambda_shift);
}

/// Same quantity by repeated matrix multiplication; integer s only.
template <typename Real>
std::complex<Real> conserved_Hs_matrix_power(const HardyState<Real>& u, int s, Real lambda_shift,
                                             EquationSign sign) {
    if (s < 0) throw std::invalid_argument("matrix power needs s >= 0");
    const CMatrix<Real> shifted =
        assemble_L(u, sign) + lambda_shift * CMatrix<Real>::Identity(u.size(), u.size());
    CVector<Real> v = u.coeffs();
    for (int k = 0; k < s; ++k) v = shifted * v;
    return u.coeffs().dot(v);
}

/// max |G - I| for the Gram matrix of a family of states.
template <typename Real>
Real gram_defect(const std::vector<HardyState<Real>>& family) {
    if (family.empty()) return 0;
    CMatrix<Real> F(family.front().size(), Index(family.size()));
    for (std::size_t i = 0; i < family.size(); ++i) {
        require_same_trunc(family.front(), family[i]);
        F.col(Index(i)) = family[i].coeffs();
    }
    const Index m = F.cols();
    return max_abs<Real>(CMatrix<Real>(F.adjoint() * F - CMatrix<Real>::Identity(m, m)));
}

/// beta_n = <u(t) | f_n^t> against an orthonormal family.
template <typename Real>
CVector<Real> birkhoff_coordinates(const HardyState<Real>& u_t, const std::vector<HardyState<Real>>& f_t,
                                   Real gram_tolerance = Real(1e-6)) {
    if (gram_defect(f_t) > gram_tolerance)
        throw std::invalid_argument("birkhoff_coordinates: basis is not orthonormal");
    CVector<Real> beta(Index(f_t.size()));
    for (std::size_t n = 0; n < f_t.size(); ++n) beta[Index(n)] = inner_product(u_t, f_t[n]);
    return beta;
}

/// max_n |beta_n(t) - beta_n(0) e^{-i t lambda_n^2}|
template <typename Real>
Real birkhoff_phase_residual(const CVector<Real>& beta_t, const CVector<Real>& beta_0,
                             const RVector<Real>& eigenvalues, Real t) {
    Real worst = 0;
    for (Index n = 0; n < beta_t.size(); ++n) {
        const Real l = eigenvalues[n];
        const std::complex<Real> predicted = beta_0[n] * std::exp(std::complex<Real>(0, -t * l * l));
        worst = std::max(worst, std::abs(beta_t[n] - predicted));
    }
    return worst;
}

/// (<Dh|h> + |h|^2) |u|^2 - |T_ubar h|^2, nonnegative up to round-off.
template <typename Real>
Real sharp_gap(const HardyState<Real>& u, const HardyState<Real>& h) {
    const Real weight = std::real(inner_product(derivative(h), h)) + l2_norm_sq(h);
    return weight * l2_norm_sq(u) - l2_norm_sq(toeplitz_conj_apply(u, h));
}

/// Per sample: max_{n < n_track} |lambda_n(u(t)) - lambda_n(u0)|.
template <typename Real>
std::vector<Real> eigenvalue_drift(const TrajectoryRecord<Real>& traj, EquationSign sign, Index n_track) {
    std::vector<Real> drift;
    if (traj.states.empty()) return drift;
    const RVector<Real> ref = lax_spectrum(traj.states.front(), sign).eigenvalues;
    const Index count = std::min(n_track, ref.size());
    for (const auto& u : traj.states) {
        const RVector<Real> now = lax_spectrum(u, sign).eigenvalues;
        drift.push_back(count == 0 ? Real(0) : (now.head(count) - ref.head(count)).cwiseAbs().maxCoeff());
    }
    return drift;
}

template <typename Real>
struct LipschitzTable {
    std::vector<Real> deltas;
    // quotients[direction][delta][n]
    std::vector<std::vector<std::vector<Real>>> quotients;
    bool bounded = true;
};

/// Difference quotients |lambda_n(u + delta w) - lambda_n(u)| / delta over
/// random unit directions w. A quotient that grows by more than a factor of
/// two from the largest to the smallest delta (plus an O(1) allowance) is
/// reported as unbounded.
template <typename Real, typename Rng>
LipschitzTable<Real> lipschitz_probe(const HardyState<Real>& u, Index directions, const std::vector<Real>& deltas,
                                     Index n_track, EquationSign sign, Rng& rng) {
    if (deltas.empty()) throw std::invalid_argument("lipschitz_probe needs deltas");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0)) throw std::invalid_argument("deltas must be positive");
        if (i > 0 && !(deltas[i] < deltas[i - 1])) throw std::invalid_argument("deltas must decrease");
    }
    LipschitzTable<Real> table;
    table.deltas = deltas;
    const RVector<Real> base = lax_spectrum(u, sign).eigenvalues;
    const Index count = std::min(n_track, base.size());
    for (Index d = 0; d < directions; ++d) {
        const HardyState<Real> w = random_state<Real>(u.trunc(), u.trunc(), Real(1), rng, Real(0.7));
        std::vector<std::vector<Real>> rows;
        for (Real delta : deltas) {
            const RVector<Real> moved = lax_spectrum(u + std::complex<Real>(delta) * w, sign).eigenvalues;
            std::vector<Real> q(static_cast<std::size_t>(count));
            for (Index n = 0; n < count; ++n) {
                q[std::size_t(n)] = std::abs(moved[n] - base[n]) / delta;
                if (!std::isfinite(q[std::size_t(n)])) table.bounded = false;
            }
            rows.push_back(std::move(q));
        }
        for (Index n = 0; n < count; ++n)
            if (rows.back()[std::size_t(n)] > Real(2) * rows.front()[std::size_t(n)] + Real(1)) table.bounded = false;
        table.quotients.push_back(std::move(rows));
    }
    return table;
}

struct DiagnosticsOptions {
    std::vector<double> sobolev_indices{0.5, 1.0, 2.0};
    Index n_track = 0;  // 0 selects N/8
    bool birkhoff = true;
    double lambda_shift = 0;  // 0 selects 2 + |u0|^2
};

/// Evaluate every conserved quantity on each sample of a trajectory.
template <typename Real>
DiagnosticsReport<Real> diagnose(const TrajectoryRecord<Real>& traj, EquationSign sign,
                                 const DiagnosticsOptions& opts) {
    DiagnosticsReport<Real> rep;
    if (traj.states.empty()) return rep;
    const HardyState<Real>& u0 = traj.states.front();
    const Index N = u0.trunc();
    const Index n_track = std::min<Index>(opts.n_track > 0 ? opts.n_track : std::max<Index>(N / 8, 1), N + 1);
    const Real shift = opts.lambda_shift > 0 ? Real(opts.lambda_shift) : default_lambda_shift(u0);
    rep.tags = traj.tags;
    rep.times = traj.times;

    for (const auto& u : traj.states) {
        rep.l2_norm.push_back(l2_norm(u));
        rep.mean.push_back(u[0]);
        const Spectrum<Real> spec = lax_spectrum(u, sign);
        for (double s : opts.sobolev_indices) rep.H_s[s].push_back(conserved_Hs(u, spec, Real(s), shift));
    }
    rep.eigenvalue_drift = eigenvalue_drift(traj, sign, n_track);

    if (opts.birkhoff) {
        const ExplicitFlow<Real> flow(u0, sign);
        std::vector<Index> idx(static_cast<std::size_t>(n_track));
        for (Index n = 0; n < n_track; ++n) idx[std::size_t(n)] = n;
        const Index T = Index(traj.times.size());
        rep.birkhoff_coordinates.resize(n_track, T);
        rep.birkhoff_moduli.resize(n_track, T);
        CVector<Real> beta0(n_track);
        for (Index n = 0; n < n_track; ++n) beta0[n] = inner_product(u0, flow.spectrum().eigenfunction(n));
        rep.birkhoff_initial_moduli = beta0.cwiseAbs();
        for (Index i = 0; i < T; ++i) {
            const Real t = Real(traj.times[std::size_t(i)]);
            const auto f_t = flow.eigenfunctions_at(t, idx);
            const CVector<Real> beta = birkhoff_coordinates(traj.states[std::size_t(i)], f_t);
            rep.birkhoff_coordinates.col(i) = beta;
            rep.birkhoff_moduli.col(i) = beta.cwiseAbs();
            rep.birkhoff_phase_residual.push_back(
                birkhoff_phase_residual<Real>(beta, beta0, flow.spectrum().eigenvalues, t));
        }
    }
    return rep;
}

}  // namespace csdnls
