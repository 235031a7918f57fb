#pragma once

// Finite-band model of the Hardy space L^2_+(T).
//
// A state holds the Fourier coefficients u^(0..N); every operator below is
// the compression of its infinite-dimensional counterpart to that band.
// Inner products use the normalized measure dx/2pi, so they are plain
// coefficient sums.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <type_traits>

#include "csdnls/errors.hpp"

namespace csdnls {

using Eigen::Index;

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <typename Real>
class HardyState {
    static_assert(std::is_floating_point_v<Real>, "HardyState needs a real floating-point scalar");

public:
    using RealScalar = Real;
    using Scalar = std::complex<Real>;
    using Vector = CVector<Real>;

    HardyState() : coeffs_(Vector::Zero(1)) {}

    /// Zero state on modes 0..trunc.
    explicit HardyState(Index trunc) {
        if (trunc < 0) throw std::invalid_argument("truncation must be nonnegative");
        coeffs_ = Vector::Zero(trunc + 1);
    }

    explicit HardyState(Vector coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.size() == 0) throw std::invalid_argument("a state needs at least the zero mode");
    }

    static HardyState zero(Index trunc) { return HardyState(trunc); }

    /// amplitude * e^{i n x}
    static HardyState mode(Index n, Scalar amplitude, Index trunc) {
        HardyState s(trunc);
        if (n < 0 || n > trunc) throw std::out_of_range("mode index outside 0..N");
        s.coeffs_[n] = amplitude;
        return s;
    }

    static HardyState constant(Scalar c, Index trunc) { return mode(0, c, trunc); }

    Index trunc() const { return coeffs_.size() - 1; }
    Index size() const { return coeffs_.size(); }

    const Vector& coeffs() const { return coeffs_; }
    Vector& coeffs() { return coeffs_; }

    Scalar operator[](Index n) const { return coeffs_[n]; }
    Scalar& operator[](Index n) { return coeffs_[n]; }

    HardyState& operator+=(const HardyState& other) {
        check(other);
        coeffs_ += other.coeffs_;
        return *this;
    }
    HardyState& operator-=(const HardyState& other) {
        check(other);
        coeffs_ -= other.coeffs_;
        return *this;
    }
    HardyState& operator*=(Scalar a) {
        coeffs_ *= a;
        return *this;
    }

    friend HardyState operator+(HardyState a, const HardyState& b) { return a += b; }
    friend HardyState operator-(HardyState a, const HardyState& b) { return a -= b; }
    friend HardyState operator*(Scalar a, HardyState b) { return b *= a; }
    friend HardyState operator*(HardyState b, Scalar a) { return b *= a; }
    friend bool operator==(const HardyState& a, const HardyState& b) {
        return a.coeffs_.size() == b.coeffs_.size() && a.coeffs_ == b.coeffs_;
    }

private:
    void check(const HardyState& other) const {
        if (other.trunc() != trunc()) throw TruncationMismatch(trunc(), other.trunc());
    }

    Vector coeffs_;
};

using HardyStated = HardyState<double>;

template <typename Real>
void require_same_trunc(const HardyState<Real>& a, const HardyState<Real>& b) {
    if (a.trunc() != b.trunc()) throw TruncationMismatch(a.trunc(), b.trunc());
}

/// Fourier coefficients on -M..M of a general L^2(T) function (|u|^2, conj(u), ...).
template <typename Real>
class FullSymbol {
public:
    using Scalar = std::complex<Real>;

    explicit FullSymbol(Index bandwidth) : bandwidth_(bandwidth) {
        if (bandwidth < 0) throw std::invalid_argument("bandwidth must be nonnegative");
        coeffs_ = CVector<Real>::Zero(2 * bandwidth + 1);
    }

    Index bandwidth() const { return bandwidth_; }

    Scalar operator()(Index n) const {
        return (n < -bandwidth_ || n > bandwidth_) ? Scalar(0) : coeffs_[n + bandwidth_];
    }
    Scalar& at(Index n) {
        if (n < -bandwidth_ || n > bandwidth_) throw std::out_of_range("frequency outside -M..M");
        return coeffs_[n + bandwidth_];
    }

    const CVector<Real>& coeffs() const { return coeffs_; }

    /// Real-valued iff coeff(-n) == conj(coeff(n)) for every n.
    bool is_real(Real tol = Real(0)) const {
        for (Index n = 0; n <= bandwidth_; ++n)
            if (std::abs((*this)(-n) - std::conj((*this)(n))) > tol) return false;
        return true;
    }

private:
    Index bandwidth_;
    CVector<Real> coeffs_;
};

/// Keep frequencies 0..N of f; modes beyond f's bandwidth come out zero.
template <typename Real>
HardyState<Real> szego_project(const FullSymbol<Real>& f, Index trunc) {
    HardyState<Real> out(trunc);
    for (Index n = 0; n <= std::min(trunc, f.bandwidth()); ++n) out[n] = f(n);
    return out;
}

/// The symbol |u|^2 on -N..N.
template <typename Real>
FullSymbol<Real> modulus_squared(const HardyState<Real>& u) {
    const Index N = u.trunc();
    FullSymbol<Real> out(N);
    for (Index m = 0; m <= N; ++m) {
        std::complex<Real> acc(0);
        for (Index j = 0; j + m <= N; ++j) acc += u[j + m] * std::conj(u[j]);
        out.at(m) = acc;
        if (m > 0) out.at(-m) = std::conj(acc);
    }
    return out;
}

/// <u|v> = sum_n u^(n) conj(v^(n)).
template <typename Real>
std::complex<Real> inner_product(const HardyState<Real>& u, const HardyState<Real>& v) {
    require_same_trunc(u, v);
    // Eigen's dot conjugates its left operand.
    return v.coeffs().dot(u.coeffs());
}

template <typename Real>
Real l2_norm_sq(const HardyState<Real>& u) {
    return u.coeffs().squaredNorm();
}

template <typename Real>
Real l2_norm(const HardyState<Real>& u) {
    return u.coeffs().norm();
}

/// sqrt(sum (1+n^2)^s |u^(n)|^2)
template <typename Real>
Real sobolev_norm(const HardyState<Real>& u, Real s) {
    if (s < 0) throw std::invalid_argument("Sobolev index must be nonnegative");
    Real acc = 0;
    for (Index n = 0; n <= u.trunc(); ++n)
        acc += std::pow(Real(1) + Real(n) * Real(n), s) * std::norm(u[n]);
    return std::sqrt(acc);
}

/// Homogeneous variant: weight n^{2s}, zero mode dropped.
template <typename Real>
Real dot_sobolev_norm(const HardyState<Real>& u, Real s) {
    if (s < 0) throw std::invalid_argument("Sobolev index must be nonnegative");
    Real acc = 0;
    for (Index n = 1; n <= u.trunc(); ++n) acc += std::pow(Real(n), 2 * s) * std::norm(u[n]);
    return std::sqrt(acc);
}

/// D = -i d/dx, i.e. n * u^(n).
template <typename Real>
HardyState<Real> derivative(const HardyState<Real>& u) {
    HardyState<Real> out(u.trunc());
    for (Index n = 0; n <= u.trunc(); ++n) out[n] = Real(n) * u[n];
    return out;
}

/// d/dx, i.e. i n u^(n).
template <typename Real>
HardyState<Real> d_dx(const HardyState<Real>& u) {
    HardyState<Real> out(u.trunc());
    for (Index n = 0; n <= u.trunc(); ++n) out[n] = std::complex<Real>(0, Real(n)) * u[n];
    return out;
}

/// S: multiplication by e^{ix}. The top coefficient falls off the band;
/// see shift_truncation_loss.
template <typename Real>
HardyState<Real> shift_apply(const HardyState<Real>& u) {
    const Index N = u.trunc();
    HardyState<Real> out(N);
    out.coeffs().tail(N) = u.coeffs().head(N);
    return out;
}

/// Magnitude of the coefficient that shift_apply discards.
template <typename Real>
Real shift_truncation_loss(const HardyState<Real>& u) {
    return std::abs(u[u.trunc()]);
}

/// S* = T_{e^{-ix}}.
template <typename Real>
HardyState<Real> shift_adjoint_apply(const HardyState<Real>& u) {
    const Index N = u.trunc();
    HardyState<Real> out(N);
    out.coeffs().head(N) = u.coeffs().tail(N);
    return out;
}

/// T_{conj u} h = Pi(conj(u) h); coefficient n is sum_{p} h^(n+p) conj(u^(p)).
/// Exact on the band: no mode of h above N is needed.
template <typename Real>
HardyState<Real> toeplitz_conj_apply(const HardyState<Real>& u, const HardyState<Real>& h) {
    require_same_trunc(u, h);
    const Index N = u.trunc();
    HardyState<Real> out(N);
    for (Index n = 0; n <= N; ++n) {
        std::complex<Real> acc(0);
        for (Index p = 0; n + p <= N; ++p) acc += h[n + p] * std::conj(u[p]);
        out[n] = acc;
    }
    return out;
}

/// Truncated Cauchy product (f g)^(j) = sum_{m<=j} f^(j-m) g^(m), j = 0..N.
/// O(N^2); used as the reference for the transform path.
template <typename Real>
HardyState<Real> convolve_direct(const HardyState<Real>& f, const HardyState<Real>& g) {
    require_same_trunc(f, g);
    const Index N = f.trunc();
    HardyState<Real> out(N);
    for (Index j = 0; j <= N; ++j) {
        std::complex<Real> acc(0);
        for (Index m = 0; m <= j; ++m) acc += f[j - m] * g[m];
        out[j] = acc;
    }
    return out;
}

/// T_u g = Pi(u g), as the lower-triangular Toeplitz convolution.
template <typename Real>
HardyState<Real> toeplitz_apply(const HardyState<Real>& u, const HardyState<Real>& g) {
    return convolve_direct(u, g);
}

/// Zero-pad (or cut) u to modes 0..trunc.
template <typename Real>
HardyState<Real> embed(const HardyState<Real>& u, Index trunc) {
    HardyState<Real> out(trunc);
    const Index n = std::min(trunc, u.trunc()) + 1;
    out.coeffs().head(n) = u.coeffs().head(n);
    return out;
}

/// c / (1 - q e^{ix}) truncated: coefficients c q^n.
template <typename Real>
HardyState<Real> rational_profile(std::complex<Real> q, std::complex<Real> c, Index trunc) {
    if (!(std::abs(q) < Real(1))) throw std::invalid_argument("rational profile needs |q| < 1");
    HardyState<Real> out(trunc);
    std::complex<Real> power(1);
    for (Index n = 0; n <= trunc; ++n) {
        out[n] = c * power;
        power *= q;
    }
    return out;
}

/// The normalization c = sqrt(1-|q|^2) that gives unit L^2 norm on the full series.
template <typename Real>
HardyState<Real> unit_rational_profile(std::complex<Real> q, Index trunc) {
    return rational_profile(q, std::complex<Real>(std::sqrt(Real(1) - std::norm(q))), trunc);
}

}  // namespace csdnls
