#pragma once

// Lax pair (L_u, B_u) as dense matrices on the band 0..N, spectra with a fixed
// eigenvector phase, and the finite-section checks of the operator identities.
//
//   focusing    L = D - T_u T_ubar    B =  T_u T_{dx ubar} - T_{dx u} T_ubar + i (T_u T_ubar)^2
//   defocusing  L = D + T_u T_ubar    B = -T_u T_{dx ubar} + T_{dx u} T_ubar + i (T_u T_ubar)^2
//
// Every matrix returned here carries the exact entries of the infinite
// operator: L needs no padding, B is built on a padded band and cropped.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "csdnls/hardy.hpp"

namespace csdnls {

enum class EquationSign { focusing, defocusing };

inline const char* to_string(EquationSign s) {
    return s == EquationSign::focusing ? "focusing" : "defocusing";
}

/// +1 for focusing, -1 for defocusing: the sign in front of 2 D Pi(|u|^2) u.
inline double sign_factor(EquationSign s) { return s == EquationSign::focusing ? 1.0 : -1.0; }

template <typename Real>
struct LaxMatrices {
    CMatrix<Real> L;
    CMatrix<Real> B;
    EquationSign sign;
    Real source_norm;
};

enum class PhaseConvention { largest_entry_real_positive };

template <typename Real>
struct Spectrum {
    RVector<Real> eigenvalues;    // ascending
    CMatrix<Real> eigenvectors;   // column n is f_n
    PhaseConvention phase_convention = PhaseConvention::largest_entry_real_positive;

    Index size() const { return eigenvalues.size(); }

    HardyState<Real> eigenfunction(Index n) const { return HardyState<Real>(eigenvectors.col(n)); }

    /// V diag(fn(lambda)) V^*
    template <typename F>
    CMatrix<Real> function_of(F&& fn) const {
        CVector<Real> d(size());
        for (Index n = 0; n < size(); ++n) d[n] = fn(eigenvalues[n]);
        return eigenvectors * d.asDiagonal() * eigenvectors.adjoint();
    }
};

/// Lower-triangular Toeplitz matrix of T_u on modes 0..dim-1: entry (j,m) = u^(j-m).
template <typename Real>
CMatrix<Real> toeplitz_matrix(const HardyState<Real>& u, Index dim) {
    CMatrix<Real> T = CMatrix<Real>::Zero(dim, dim);
    for (Index d = 0; d <= std::min(u.trunc(), dim - 1); ++d)
        T.diagonal(-d).setConstant(u[d]);
    return T;
}

/// Matrix of S* on modes 0..dim-1 (ones on the superdiagonal).
template <typename Real>
CMatrix<Real> shift_adjoint_matrix(Index dim) {
    CMatrix<Real> S = CMatrix<Real>::Zero(dim, dim);
    if (dim > 1) S.diagonal(1).setOnes();
    return S;
}

template <typename Real>
CMatrix<Real> derivative_matrix(Index dim) {
    CMatrix<Real> D = CMatrix<Real>::Zero(dim, dim);
    for (Index n = 0; n < dim; ++n) D(n, n) = Real(n);
    return D;
}

/// L on modes 0..N: L[j][k] = j delta_jk -/+ sum_{m<=min(j,k)} u^(j-m) conj(u^(k-m)).
template <typename Real>
CMatrix<Real> assemble_L(const HardyState<Real>& u, EquationSign sign) {
    const Index dim = u.size();
    const CMatrix<Real> T = toeplitz_matrix(u, dim);
    const Real s = Real(sign_factor(sign));
    CMatrix<Real> L = derivative_matrix<Real>(dim);
    L.noalias() -= s * (T * T.adjoint());
    return L;
}

namespace detail {

// B with an explicit coefficient on the derivative terms; the sign-corrupted
// variant used by the verification negative control flips it.
template <typename Real>
CMatrix<Real> assemble_B_with(const HardyState<Real>& u, Real derivative_coeff) {
    const Index N = u.trunc();
    // u has degree <= N, so intermediate modes never exceed 2N.
    const Index work = 2 * N + 1;
    const CMatrix<Real> T = toeplitz_matrix(u, work);
    const CMatrix<Real> Tx = toeplitz_matrix(d_dx(u), work);
    const CMatrix<Real> K = T * T.adjoint();
    CMatrix<Real> B = derivative_coeff * (T * Tx.adjoint() - Tx * T.adjoint());
    B.noalias() += std::complex<Real>(0, 1) * (K * K);
    return B.topLeftCorner(N + 1, N + 1);
}

}  // namespace detail

template <typename Real>
CMatrix<Real> assemble_B(const HardyState<Real>& u, EquationSign sign) {
    return detail::assemble_B_with(u, Real(sign_factor(sign)));
}

template <typename Real>
LaxMatrices<Real> lax_matrices(const HardyState<Real>& u, EquationSign sign) {
    return {assemble_L(u, sign), assemble_B(u, sign), sign, l2_norm(u)};
}

template <typename Real>
Real max_abs(const CMatrix<Real>& m) {
    return m.size() == 0 ? Real(0) : m.cwiseAbs().maxCoeff();
}

template <typename Real>
Real hermitian_defect(const CMatrix<Real>& m) {
    return max_abs<Real>(m - m.adjoint());
}

template <typename Real>
Real skew_hermitian_defect(const CMatrix<Real>& m) {
    return max_abs<Real>(m + m.adjoint());
}

/// Rotate each column so its largest-modulus entry is real and positive.
/// Ties (within relative 1e-10) go to the lowest index.
template <typename Real>
void fix_phases(CMatrix<Real>& V) {
    for (Index c = 0; c < V.cols(); ++c) {
        const Real peak = V.col(c).cwiseAbs().maxCoeff();
        Index pick = 0;
        for (Index r = 0; r < V.rows(); ++r) {
            if (std::abs(V(r, c)) >= peak * (Real(1) - Real(1e-10))) {
                pick = r;
                break;
            }
        }
        const std::complex<Real> z = V(pick, c);
        V.col(c) *= std::conj(z) / std::abs(z);
        V(pick, c) = std::abs(V(pick, c));
    }
}

/// Ascending eigenpairs of a Hermitian matrix.
template <typename Real>
Spectrum<Real> spectrum(const CMatrix<Real>& L) {
    if (L.rows() != L.cols()) throw std::invalid_argument("spectrum needs a square matrix");
    const Real tol = Real(1e-12) * (Real(1) + max_abs<Real>(L));
    if (hermitian_defect<Real>(L) > tol)
        throw NumericalFailure("spectrum: matrix is not Hermitian within tolerance");
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(L);
    if (solver.info() != Eigen::Success) throw NumericalFailure("spectrum: eigensolver did not converge");
    Spectrum<Real> out;
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    fix_phases(out.eigenvectors);
    return out;
}

template <typename Real>
Spectrum<Real> lax_spectrum(const HardyState<Real>& u, EquationSign sign) {
    return spectrum<Real>(assemble_L(u, sign));
}

/// Focusing form Q_u(f,g) = <D^{1/2} f | D^{1/2} g> - <T_ubar f | T_ubar g>.
template <typename Real>
std::complex<Real> quadratic_form(const HardyState<Real>& u, const HardyState<Real>& f,
                                  const HardyState<Real>& g) {
    require_same_trunc(u, f);
    require_same_trunc(f, g);
    return inner_product(derivative(f), g) -
           inner_product(toeplitz_conj_apply(u, f), toeplitz_conj_apply(u, g));
}

template <typename Real>
struct CommutatorResiduals {
    Real l_identity;  // [S*, L] - (S* -/+ <.|u> S* u)
    Real b_identity;  // [S*, B] - i (S* L^2 - (L+1)^2 S*)
    Index block;      // residuals measured on rows/cols 0..block-1
};

/// Both commutator identities, built on a band of 2N+1 modes (so every
/// product is exact on 0..N) and measured on rows/cols 0..N-2.
template <typename Real>
CommutatorResiduals<Real> commutator_checks(const HardyState<Real>& u, EquationSign sign,
                                            Real b_derivative_coeff) {
    using C = std::complex<Real>;
    const Index N = u.trunc();
    const HardyState<Real> w = embed(u, 2 * N);
    const Index dim = w.size();
    const Real s = Real(sign_factor(sign));

    const CMatrix<Real> L = assemble_L(w, sign);
    const CMatrix<Real> B = detail::assemble_B_with(w, b_derivative_coeff);
    const CMatrix<Real> Sa = shift_adjoint_matrix<Real>(dim);
    const CMatrix<Real> I = CMatrix<Real>::Identity(dim, dim);

    // <.|u> S*u as a matrix: column k is conj(u^(k)) S*u.
    const CVector<Real> sau = shift_adjoint_apply(w).coeffs();
    const CMatrix<Real> rank_one = sau * w.coeffs().adjoint();

    const CMatrix<Real> l_res = (Sa * L - L * Sa) - (Sa - s * rank_one);
    const CMatrix<Real> Lp = L + I;
    const CMatrix<Real> b_res = (Sa * B - B * Sa) - C(0, 1) * (Sa * L * L - Lp * Lp * Sa);

    const Index block = std::max<Index>(N - 1, 0);
    return {max_abs<Real>(l_res.topLeftCorner(block, block)),
            max_abs<Real>(b_res.topLeftCorner(block, block)), block};
}

template <typename Real>
CommutatorResiduals<Real> commutator_checks(const HardyState<Real>& u, EquationSign sign) {
    return commutator_checks(u, sign, Real(sign_factor(sign)));
}

/// [B, L] restricted to modes 0..N, computed on a 2N+1 band so the inner
/// sum over modes is complete.
template <typename Real>
CMatrix<Real> lax_commutator(const HardyState<Real>& u, EquationSign sign, Real b_derivative_coeff) {
    const Index N = u.trunc();
    const HardyState<Real> w = embed(u, 2 * N);
    const CMatrix<Real> L = assemble_L(w, sign);
    const CMatrix<Real> B = detail::assemble_B_with(w, b_derivative_coeff);
    return (B * L - L * B).topLeftCorner(N + 1, N + 1);
}

/// max over interior samples of |(L(t+dt) - L(t-dt))/(2 dt) - [B(t), L(t)]| on
/// rows/cols 0..N-2.
template <typename Real>
Real lax_residual(const std::vector<HardyState<Real>>& traj, Real dt, EquationSign sign,
                  Real b_derivative_coeff) {
    if (traj.size() < 3) throw std::invalid_argument("lax_residual needs at least 3 samples");
    if (!(dt > 0)) throw std::invalid_argument("lax_residual needs dt > 0");
    const Index N = traj.front().trunc();
    for (const auto& u : traj)
        if (u.trunc() != N) throw TruncationMismatch(N, u.trunc());
    const Index block = std::max<Index>(N - 1, 1);

    std::vector<CMatrix<Real>> Ls;
    Ls.reserve(traj.size());
    for (const auto& u : traj) Ls.push_back(assemble_L(u, sign));

    Real worst = 0;
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
        const CMatrix<Real> dL = (Ls[i + 1] - Ls[i - 1]) / (Real(2) * dt);
        const CMatrix<Real> res = dL - lax_commutator(traj[i], sign, b_derivative_coeff);
        worst = std::max(worst, max_abs<Real>(res.topLeftCorner(block, block)));
    }
    return worst;
}

template <typename Real>
Real lax_residual(const std::vector<HardyState<Real>>& traj, Real dt, EquationSign sign) {
    return lax_residual(traj, dt, sign, Real(sign_factor(sign)));
}

}  // namespace csdnls
