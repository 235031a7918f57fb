#include "doctest.h"

#include <array>
#include <random>

#include "csdnls/diagnostics.hpp"
#include "csdnls/hardy.hpp"
#include "csdnls/random_states.hpp"
#include "csdnls/transform_product.hpp"

using namespace csdnls;
using C = std::complex<double>;

namespace {

HardyStated state(std::initializer_list<C> c) {
    CVector<double> v(static_cast<Index>(c.size()));
    Index i = 0;
    for (const C& x : c) v[i++] = x;
    return HardyStated(v);
}

double dist(const HardyStated& a, const HardyStated& b) { return (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff(); }

// Independent reference: all pairs (i, j) with i + j <= N.
HardyStated brute_product(const HardyStated& f, const HardyStated& g) {
    HardyStated out(f.trunc());
    for (Index i = 0; i <= f.trunc(); ++i)
        for (Index j = 0; i + j <= f.trunc(); ++j) out[i + j] += f[i] * g[j];
    return out;
}

}  // namespace

TEST_CASE("state construction and arithmetic") {
    HardyStated u(3);
    CHECK(u.trunc() == 3);
    CHECK(u.size() == 4);
    CHECK_THROWS_AS(HardyStated(-1), std::invalid_argument);
    CHECK_THROWS_AS(HardyStated(CVector<double>()), std::invalid_argument);
    CHECK_THROWS_AS(HardyStated(2) + HardyStated(3), TruncationMismatch);
    const auto m = HardyStated::mode(2, C(0, 1), 3);
    CHECK(m[2] == C(0, 1));
    CHECK_THROWS_AS(HardyStated::mode(4, C(1), 3), std::out_of_range);
}

TEST_CASE("szego projection") {
    FullSymbol<double> f(1);
    f.at(-1) = 2;
    f.at(0) = 3;
    f.at(1) = 5;
    CHECK(szego_project(f, 2) == state({3, 5, 0}));
    CHECK(szego_project(FullSymbol<double>(3), 2) == HardyStated(2));

    FullSymbol<double> r(1);
    const C a(0.3, -0.7);
    r.at(-1) = std::conj(a);
    r.at(0) = 1.5;
    r.at(1) = a;
    CHECK(r.is_real());
    CHECK(szego_project(r, 2) == state({1.5, a, 0}));

    SUBCASE("idempotent") {
        const auto once = szego_project(f, 4);
        FullSymbol<double> lifted(4);
        for (Index n = 0; n <= 4; ++n) lifted.at(n) = once[n];
        CHECK(szego_project(lifted, 4) == once);
    }
}

TEST_CASE("modulus squared is a real symbol and agrees with the grid path") {
    std::mt19937_64 rng(11);
    const auto u = random_state<double>(12, 12, 1.3, rng);
    const auto direct = modulus_squared(u);
    CHECK(direct.is_real(1e-14));
    const auto grid = modulus_squared_transform(u);
    CHECK((direct.coeffs() - grid.coeffs()).cwiseAbs().maxCoeff() < 1e-14);
    // Zero mode is |u|^2 by Parseval.
    CHECK(std::abs(direct(0) - l2_norm_sq(u)) < 1e-14);
}

TEST_CASE("inner product") {
    const auto e1 = HardyStated::mode(1, 1, 2);
    const auto one = HardyStated::constant(1, 2);
    CHECK(inner_product(e1, e1) == C(1));
    CHECK(inner_product(e1, one) == C(0));
    CHECK(inner_product(state({1, C(0, 2)}), state({3, 1})) == C(3, 2));
    CHECK_THROWS_AS(inner_product(e1, HardyStated(3)), TruncationMismatch);
}

TEST_CASE("sobolev norms") {
    CHECK(sobolev_norm(HardyStated::constant(1, 4), 3.7) == doctest::Approx(1.0));
    CHECK(sobolev_norm(HardyStated::mode(1, 1, 4), 0.5) == doctest::Approx(std::pow(2.0, 0.25)));
    CHECK(sobolev_norm(state({0, 3}), 1.0) == doctest::Approx(3 * std::sqrt(2.0)));
    CHECK(dot_sobolev_norm(state({7, 3}), 1.0) == doctest::Approx(3.0));
    CHECK_THROWS_AS(sobolev_norm(state({1}), -0.1), std::invalid_argument);
}

TEST_CASE("derivatives") {
    CHECK(derivative(HardyStated::constant(1, 3)) == HardyStated(3));
    CHECK(derivative(HardyStated::mode(1, 1, 3)) == HardyStated::mode(1, 1, 3));
    CHECK(derivative(state({0, 2, 5})) == state({0, 2, 10}));
    CHECK(d_dx(state({0, 2, 5})) == state({0, C(0, 2), C(0, 10)}));
}

TEST_CASE("shift and its adjoint") {
    CHECK(shift_adjoint_apply(HardyStated::constant(1, 3)) == HardyStated(3));

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        auto u = random_state<double>(10, 9, 1.0, rng);  // top mode empty
        CHECK(shift_truncation_loss(u) == 0.0);
        CHECK(dist(shift_adjoint_apply(shift_apply(u)), u) < 1e-15);
        auto expected = u;
        expected[0] = 0;
        CHECK(dist(shift_apply(shift_adjoint_apply(u)), expected) < 1e-15);
        CHECK(l2_norm(shift_apply(u)) == doctest::Approx(l2_norm(u)).epsilon(1e-14));
    }
    const auto full = state({1, 2, 3});
    CHECK(shift_truncation_loss(full) == 3.0);
    CHECK(shift_apply(full) == state({0, 1, 2}));
}

TEST_CASE("toeplitz with conjugate symbol") {
    const auto e1 = HardyStated::mode(1, 1, 3);
    CHECK(toeplitz_conj_apply(e1, e1) == HardyStated::constant(1, 3));
    std::mt19937_64 rng(2);
    const auto h = random_state<double>(6, 6, 1.0, rng);
    CHECK(dist(toeplitz_conj_apply(HardyStated::constant(1, 6), h), h) == 0.0);
    CHECK(toeplitz_conj_apply(e1, HardyStated::constant(1, 3)) == HardyStated(3));
    CHECK_THROWS_AS(toeplitz_conj_apply(e1, h), TruncationMismatch);
}

TEST_CASE("toeplitz with holomorphic symbol") {
    const auto one = HardyStated::constant(1, 3);
    const auto e1 = HardyStated::mode(1, 1, 3);
    CHECK(toeplitz_apply(e1, one) == e1);
    std::mt19937_64 rng(3);
    const auto g = random_state<double>(3, 3, 2.0, rng);
    CHECK(toeplitz_apply(one, g) == g);
    CHECK(toeplitz_apply(state({1, 1, 0}), state({1, 1, 0})) == state({1, 2, 1}));

    SUBCASE("direct and transform paths agree") {
        for (Index N : {4, 17, 32, 63}) {
            const auto u = random_state<double>(N, N, 1.0, rng, 0.9);
            const auto v = random_state<double>(N, N, 1.0, rng, 0.9);
            CHECK(dist(toeplitz_apply(u, v), toeplitz_apply_transform(u, v)) < 1e-14);
        }
    }
}

TEST_CASE("pointwise product") {
    const auto e1 = HardyStated::mode(1, 1, 2);
    CHECK(dist(pointwise_product(e1, e1), HardyStated::mode(2, 1, 2)) < 1e-15);
    std::mt19937_64 rng(4);
    const auto u = random_state<double>(2, 2, 1.0, rng);
    CHECK(dist(pointwise_product(HardyStated::constant(1, 2), u), u) < 1e-15);

    // Frozen against the all-pairs reference.
    const auto f = state({1, 1, 0});
    const auto expect = brute_product(f, f);
    CHECK(expect == state({1, 2, 1}));
    CHECK(dist(pointwise_product(f, f), expect) < 1e-15);

    SUBCASE("dealiasing removes fold-over; the raw grid does not") {
        const auto a = random_state<double>(32, 32, 1.0, rng, 0.95);
        const auto b = random_state<double>(32, 32, 1.0, rng, 0.95);
        const auto exact = brute_product(a, b);
        CHECK(dist(pointwise_product(a, b, true), exact) < 1e-12);
        CHECK(dist(pointwise_product(a, b, false), exact) > 1e-6);
    }
}

TEST_CASE("grid sizes") {
    CHECK(fft_size(1) == 1);
    CHECK(fft_size(7) == 8);
    CHECK(fft_size(129) == 135);
    CHECK(fft_size(257) == 270);
    for (Index N : {4, 10, 64, 100}) CHECK(dealiased_grid_size(N) >= 2 * N + 1);
}

TEST_CASE("rational profile") {
    CHECK(rational_profile<double>(C(0), C(0.5, 1), 4) == HardyStated::constant(C(0.5, 1), 4));
    CHECK_THROWS_AS(rational_profile<double>(C(1.0), C(1), 4), std::invalid_argument);
    CHECK_THROWS_AS(rational_profile<double>(C(0, 1.2), C(1), 4), std::invalid_argument);

    const auto u = unit_rational_profile<double>(C(0.5), 20);
    CHECK(l2_norm_sq(u) == doctest::Approx(1 - std::pow(0.5, 42)).epsilon(1e-15));
    CHECK(l2_norm(unit_rational_profile<double>(C(0.5), 200)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("adjointness of T_u and T_ubar on the band interior") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const Index N = 16;
        const auto u = random_state<double>(N, N, 1.0, rng, 0.8);
        const auto h = random_state<double>(N, N - 1, 1.0, rng, 0.8);
        const auto g = random_state<double>(N, N - 1, 1.0, rng, 0.8);
        const C lhs = inner_product(toeplitz_conj_apply(u, h), g);
        const C rhs = inner_product(h, toeplitz_apply(u, g));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("sharp Toeplitz inequality over random pairs") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> pick(0, 3);
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Index N = std::array<Index, 4>{4, 8, 16, 40}[std::size_t(pick(rng))];
        const auto u = random_state<double>(N, N, 1.0 + trial % 3, rng, 0.9);
        const auto h = random_state<double>(N, N, 1.0, rng, 0.9);
        worst = std::min(worst, sharp_gap(u, h));
    }
    CHECK(worst >= -1e-12);
}

TEST_CASE("equality case of the sharp inequality") {
    for (C q : {C(0.3), C(0.6), C(0, 0.9)}) {
        // Closed form for the truncated geometric profile, r = |q|^2, c^2 = 1 - r.
        for (Index N : {8, 32}) {
            const double r = std::norm(q);
            double norm_sq = 0, weight = 0, tsq = 0;
            for (Index k = 0; k <= N; ++k) {
                norm_sq += (1 - r) * std::pow(r, double(k));
                weight += (1 - r) * double(k + 1) * std::pow(r, double(k));
                tsq += std::pow(r, double(k)) * std::pow(1 - std::pow(r, double(N + 1 - k)), 2);
            }
            const auto u = unit_rational_profile<double>(q, N);
            CHECK(std::abs(sharp_gap(u, u) - (weight * norm_sq - tsq)) <= 1e-14);
        }
        const Index N = 256;
        const auto u = unit_rational_profile<double>(q, N);
        const double rel = sharp_gap(u, u) / std::pow(l2_norm_sq(u), 2);
        CHECK(rel <= std::pow(std::abs(q), 2.0 * double(N)) + 1e-12);
    }
}

TEST_CASE("Hilbert-Schmidt identity for u -> T_ubar h") {
    std::mt19937_64 rng(8);
    const Index N = 24;
    const Index B = N / 2;
    for (int trial = 0; trial < 20; ++trial) {
        const auto h = random_state<double>(N, N - B, 1.0 + trial, rng, 0.9);
        double hs = 0;
        for (Index n = 0; n <= B; ++n) hs += l2_norm_sq(toeplitz_conj_apply(HardyStated::mode(n, 1, N), h));
        const double expected = std::real(inner_product(derivative(h), h)) + l2_norm_sq(h);
        CHECK(std::abs(hs - expected) <= 1e-10);
    }
}

TEST_CASE("extended precision instantiation") {
    using Ld = long double;
    const auto u = unit_rational_profile<Ld>(std::complex<Ld>(0.5L), 30);
    CHECK(std::abs(double(l2_norm_sq(u) - (1.0L - std::pow(0.5L, 62)))) < 1e-18);
    const auto p = pointwise_product(u, u);
    CHECK(double((p.coeffs() - convolve_direct(u, u).coeffs()).cwiseAbs().maxCoeff()) < 1e-15);
}
