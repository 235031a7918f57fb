#include "doctest.h"

#include <random>

#include "csdnls/diagnostics.hpp"

using namespace csdnls;
using C = std::complex<double>;

namespace {

constexpr EquationSign kSigns[] = {EquationSign::focusing, EquationSign::defocusing};

HardyStated mixed(Index N) {
    HardyStated u(N);
    u[0] = 0.2;
    u[1] = 0.3;
    return u;
}

TrajectoryRecord<double> direct(const HardyStated& u0, EquationSign s, std::vector<double> times, double dt) {
    FlowConfig cfg;
    cfg.sign = s;
    cfg.N = u0.trunc();
    cfg.t_samples = std::move(times);
    cfg.dt = dt;
    return evolve_direct(u0, cfg);
}

std::vector<Index> first(Index n) {
    std::vector<Index> idx(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) idx[std::size_t(i)] = i;
    return idx;
}

}  // namespace

TEST_CASE("H_s closed forms") {
    std::mt19937_64 rng(31);
    for (auto s : kSigns) {
        const auto u = random_state<double>(16, 8, 0.8, rng);
        for (double shift : {2.64, 5.0}) CHECK(conserved_Hs(u, 0.0, shift, s) == doctest::Approx(l2_norm_sq(u)).epsilon(1e-13));
    }
    const C c(0.3, -0.5);
    const double lam = 3.0;
    CHECK(conserved_Hs(HardyStated::constant(c, 12), 1.0, lam, EquationSign::focusing) ==
          doctest::Approx((lam - std::norm(c)) * std::norm(c)).epsilon(1e-13));

    CHECK_THROWS_AS(conserved_Hs(HardyStated::constant(C(0.9), 8), 1.0, 0.5, EquationSign::focusing), NumericalFailure);
    CHECK_THROWS_AS(conserved_Hs(HardyStated(8), -1.0, 2.0, EquationSign::focusing), std::invalid_argument);
}

TEST_CASE("H_s through the spectrum equals the matrix power form") {
    std::mt19937_64 rng(32);
    for (auto s : kSigns) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto u = random_state<double>(24, 12, 0.9, rng);
            const double shift = default_lambda_shift(u);
            for (int p : {0, 1, 2, 3}) {
                const C direct = conserved_Hs_matrix_power(u, p, shift, s);
                CHECK(std::abs(direct.imag()) <= 1e-10);
                CHECK(std::abs(conserved_Hs(u, double(p), shift, s) - direct.real()) <= 1e-10 * (1 + direct.real()));
            }
        }
    }
}

TEST_CASE("H_s and eigenvalues are conserved along the direct flow") {
    const auto u0 = mixed(64);
    for (auto s : kSigns) {
        const auto rec = direct(u0, s, {0.0, 0.5, 1.0}, 1e-4);
        DiagnosticsOptions opts;
        opts.n_track = 8;
        const auto rep = diagnose(rec, s, opts);
        CHECK(rep.times.size() == 3);
        for (const auto& [idx, vals] : rep.H_s) {
            REQUIRE(vals.size() == 3);
            for (double v : vals) CHECK(std::abs(v - vals[0]) / vals[0] <= 1e-6);
        }
        CHECK(rep.H_s.size() == 3);
        for (double d : rep.eigenvalue_drift) CHECK(d <= 1e-6);
        for (double r : rep.birkhoff_phase_residual) CHECK(r <= 1e-5);
        for (Index i = 0; i < 3; ++i)
            CHECK((rep.birkhoff_moduli.col(i) - rep.birkhoff_initial_moduli).cwiseAbs().maxCoeff() <= 1e-5);
        CHECK(rep.l2_norm.size() == 3);
        CHECK(rep.mean.size() == 3);
    }
}

TEST_CASE("birkhoff coordinates") {
    SUBCASE("t = 0 and constant data") {
        const C c(0.5, 0.2);
        const auto u0 = HardyStated::constant(c, 16);
        const ExplicitFlow<double> flow(u0, EquationSign::focusing);
        const auto f0 = flow.eigenfunctions_at(0.0, first(17));
        const auto beta = birkhoff_coordinates(u0, f0);
        Index nonzero = 0;
        for (Index n = 0; n < beta.size(); ++n)
            if (std::abs(beta[n]) > 1e-12) {
                ++nonzero;
                CHECK(std::abs(beta[n]) == doctest::Approx(std::abs(c)).epsilon(1e-13));
            }
        CHECK(nonzero == 1);
    }
    SUBCASE("phase law for the rational profile") {
        const auto u0 = rational_profile(C(0.4), C(std::sqrt(0.84)), 64);
        const ExplicitFlow<double> flow(u0, EquationSign::focusing);
        const auto idx = first(9);
        const auto beta0 = birkhoff_coordinates(u0, flow.eigenfunctions_at(0.0, idx));
        const auto beta = birkhoff_coordinates(flow.state_at(0.5), flow.eigenfunctions_at(0.5, idx));
        CHECK(birkhoff_phase_residual<double>(beta, beta0, flow.spectrum().eigenvalues, 0.5) <= 1e-5);
    }
    SUBCASE("Parseval in an orthonormal basis") {
        std::mt19937_64 rng(33);
        const auto u = random_state<double>(32, 12, 0.7, rng);
        const auto sp = lax_spectrum(u, EquationSign::defocusing);
        std::vector<HardyStated> basis;
        for (Index n = 0; n < sp.size(); ++n) basis.push_back(sp.eigenfunction(n));
        CHECK(gram_defect(basis) <= 1e-8);
        CHECK(std::abs(birkhoff_coordinates(u, basis).squaredNorm() - l2_norm_sq(u)) <= 1e-10);
    }
    SUBCASE("non-orthonormal family is rejected") {
        std::vector<HardyStated> fam{HardyStated::mode(0, C(1), 4), HardyStated::mode(0, C(1), 4)};
        CHECK_THROWS_AS(birkhoff_coordinates(HardyStated(4), fam), std::invalid_argument);
    }
}

TEST_CASE("sharp gap") {
    CHECK(sharp_gap(HardyStated::mode(1, C(1), 4), HardyStated::mode(0, C(1), 4)) == doctest::Approx(1.0));
    std::mt19937_64 rng(34);
    CHECK(sharp_gap(HardyStated(8), random_state<double>(8, 8, 1.0, rng)) == 0);

    for (Index N : {8, 32, 128}) {
        double worst = 0;
        for (int trial = 0; trial < 10000; ++trial) {
            const auto u = random_state<double>(N, N, 1.0, rng, 0.8);
            const auto h = random_state<double>(N, N, 1.0, rng, 0.8);
            worst = std::min(worst, sharp_gap(u, h));
        }
        CHECK(worst >= -1e-12);
    }
}

TEST_CASE("eigenvalue drift") {
    const auto cst = HardyStated::constant(C(0.6, 0.1), 16);
    for (double d : eigenvalue_drift(direct(cst, EquationSign::focusing, {0.0, 0.5, 1.0}, 1e-3), EquationSign::focusing, 4))
        CHECK(d <= 1e-12);

    const auto single = HardyStated::mode(2, C(0.7), 16);
    for (auto s : kSigns)
        for (double d : eigenvalue_drift(direct(single, s, {0.0, 0.5, 1.0}, 1e-3), s, 17)) CHECK(d <= 1e-10);

    TrajectoryRecord<double> empty;
    CHECK(eigenvalue_drift(empty, EquationSign::focusing, 4).empty());
}

TEST_CASE("lipschitz probe") {
    const std::vector<double> deltas{1e-2, 1e-3, 1e-4};
    SUBCASE("u = 0") {
        std::mt19937_64 rng(35);
        const auto t = lipschitz_probe(HardyStated(16), 5, deltas, 9, EquationSign::focusing, rng);
        CHECK(t.bounded);
        for (const auto& dir : t.quotients)
            for (const auto& row : dir)
                for (std::size_t n = 0; n < row.size(); ++n) CHECK(row[n] <= 2.0 * double(n + 1));
    }
    SUBCASE("quotients stabilize") {
        std::mt19937_64 rng(36);
        const auto u = random_state<double>(24, 12, 0.5, rng);
        const auto t = lipschitz_probe(u, 5, deltas, 5, EquationSign::focusing, rng);
        CHECK(t.bounded);
        for (const auto& dir : t.quotients)
            for (std::size_t n = 0; n < dir[1].size(); ++n)
                CHECK(std::abs(dir[2][n] - dir[1][n]) <= 0.1 * std::max(dir[1][n], 1e-3));
    }
    SUBCASE("argument validation") {
        std::mt19937_64 rng(37);
        CHECK_THROWS_AS(lipschitz_probe(HardyStated(8), 1, std::vector<double>{}, 4, EquationSign::focusing, rng),
                        std::invalid_argument);
        CHECK_THROWS_AS(lipschitz_probe(HardyStated(8), 1, std::vector<double>{1e-3, 1e-2}, 4,
                                        EquationSign::focusing, rng),
                        std::invalid_argument);
        CHECK_THROWS_AS(lipschitz_probe(HardyStated(8), 1, std::vector<double>{1e-3, -1.0}, 4,
                                        EquationSign::focusing, rng),
                        std::invalid_argument);
    }
}
