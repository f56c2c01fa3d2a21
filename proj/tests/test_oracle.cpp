#include <doctest.h>

#include <cmath>
#include <complex>

#include "qgrav/oracle.hpp"
#include "qgrav/precision.hpp"

using namespace qgrav;
using oracle::CMat;
using oracle::FockConfig;
using cdbl = std::complex<double>;

TEST_CASE("matrix exponential matches the power series") {
    CMat m(3);
    m(0, 0) = {0.1, 0.2};
    m(0, 1) = {-0.3, 0.05};
    m(0, 2) = {0.0, 1.4};
    m(1, 0) = {0.2, -0.1};
    m(1, 2) = {0.5, 0.0};
    m(2, 0) = {-0.2, 0.3};
    m(2, 1) = {0.1, 0.1};
    m(2, 2) = {-0.4, 0.2};
    CMat e = oracle::expm(m);
    CMat s = CMat::identity(3), term = CMat::identity(3);
    for (int k = 1; k < 60; ++k) {
        term = (term * m).scaled(1.0 / k);
        s = s + term;
    }
    for (size_t i = 0; i < e.a.size(); ++i) CHECK(std::abs(e.a[i] - s.a[i]) < 1e-12);
}

TEST_CASE("hermitian eigendecomposition reconstructs the operator") {
    FockConfig cfg;
    cfg.dim_mech = 24;
    CMat h = oracle::mech_position(cfg) + oracle::mech_momentum(cfg) * oracle::mech_position(cfg) *
                                              oracle::mech_momentum(cfg);
    std::vector<double> eigs;
    CMat v;
    oracle::hermitian_eig(h, eigs, v);
    CMat lam(cfg.dim_mech);
    for (int i = 0; i < cfg.dim_mech; ++i) lam(i, i) = eigs[i];
    CMat rec = v * lam * v.dagger();
    for (size_t i = 0; i < rec.a.size(); ++i) CHECK(std::abs(rec.a[i] - h.a[i]) < 1e-10);
}

TEST_CASE("commutator check per deformation model") {
    FockConfig cfg;
    cfg.dim_mech = 200;
    SUBCASE("canonical pair is exact in the bulk") {
        cfg.model = Deformation::none;
        CHECK(oracle::commutator_check(cfg) < 1e-10);
    }
    SUBCASE("beta representation holds to first order") {
        cfg.model = Deformation::beta;
        cfg.strength = 1e-4;
        CHECK(oracle::commutator_check(cfg) <= 1e-6);
    }
    SUBCASE("gamma representation holds to first order") {
        cfg.model = Deformation::gamma;
        cfg.strength = 1e-4;
        CHECK(oracle::commutator_check(cfg) <= 1e-6);
    }
    SUBCASE("mu rescaling is exact") {
        cfg.model = Deformation::mu;
        cfg.strength = 0.37;
        CHECK(oracle::commutator_check(cfg) < 1e-10);
    }
}

TEST_CASE("simulated square loop matches the exact coherent-state expectation") {
    FockConfig cfg;
    cfg.dim_light = 64;
    cfg.dim_mech = 24;
    cfg.lambda0 = 0.05;
    auto res = oracle::simulate_loop(loops::preset("square"), cfg, 3.0, 0.0);
    double l2 = cfg.lambda0 * cfg.lambda0, np = 9.0;
    double closed_phase = l2 + np * std::sin(2 * l2);
    cdbl closed = std::exp(cdbl(0, -l2)) * std::exp(-np * (1.0 - std::exp(cdbl(0, -2 * l2))));
    CHECK(res.phase == doctest::Approx(closed_phase).epsilon(1e-8));
    CHECK(res.amplitude == doctest::Approx(std::abs(closed) * 3.0).epsilon(1e-8));
}

TEST_CASE("zero coupling leaves the carrier untouched") {
    FockConfig cfg;
    cfg.dim_light = 48;
    cfg.dim_mech = 40;
    cfg.lambda0 = 0.0;
    auto res = oracle::simulate_loop(loops::preset("square"), cfg, 2.0, 0.5);
    CHECK(std::abs(res.phase) < 1e-12);
    CHECK(res.amplitude == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("composed pulse unitaries stay unitary") {
    FockConfig cfg;
    cfg.dim_light = 32;
    cfg.dim_mech = 24;
    cfg.lambda0 = 0.08;
    cfg.k = 1e-3;
    cfg.k_order = 2;
    CHECK(oracle::unitarity_defect(loops::preset("gamma-fourloop"), cfg, 30) < 1e-9);
}

TEST_CASE("beta phase shift follows the quartic signal rule at large coupling") {
    // choose lambda^2 N_p^2 large so the quartic term dominates the residual
    // quadratic-word correction
    FockConfig cfg;
    cfg.dim_light = 140;
    cfg.dim_mech = 28;
    cfg.lambda0 = 0.1;
    double alpha = 7.0, np = alpha * alpha;
    auto base = oracle::simulate_loop(loops::preset("square"), cfg, alpha, 0.0);
    cfg.model = Deformation::beta;
    cfg.strength = 1e-3;
    auto def = oracle::simulate_loop(loops::preset("square"), cfg, alpha, 0.0);
    double got = def.phase - base.phase;
    double rule = 4.0 / 3.0 * cfg.strength * std::pow(cfg.lambda0, 4) * std::pow(np, 3);
    // finite-Np corrections of the discrete difference rule:
    // (4/3) beta l^4 E[(n+1)^4 - n^4] = (4/3) beta l^4 (N^3 + 4.5 N^2 + 4 N + ...)
    double rule_exact = cfg.strength / 3.0 * std::pow(cfg.lambda0, 4) *
                        (4 * std::pow(np, 3) + 18 * np * np + 16 * np + 4);
    CHECK(got == doctest::Approx(rule_exact).epsilon(0.05));
    CHECK(got == doctest::Approx(rule).epsilon(0.30));
}

TEST_CASE("cutoff guards") {
    FockConfig cfg;
    cfg.dim_light = 16;
    cfg.dim_mech = 8;
    CHECK_THROWS_AS(oracle::simulate_loop(loops::preset("square"), cfg, 3.0, 0.0),
                    cutoff_exceeded);
    cfg.dim_light = 64;
    CHECK_THROWS_AS(oracle::simulate_loop(loops::preset("square"), cfg, 2.0, 3.0),
                    cutoff_exceeded);
}

TEST_CASE("squeezed state moments match the closed forms") {
    for (double r : {-1.2, 1.2}) {
        for (double a : {3.0}) {
            auto m = oracle::squeezed_state_moments({a, 0.0}, r, 340);
            auto c = precision::squeezed_moments({a, 0.0}, r);
            CHECK(m.N_p == doctest::Approx(c.N_p).epsilon(1e-8));
            CHECK(m.dNp == doctest::Approx(c.dNp).epsilon(1e-8));
            CHECK(m.dPhi == doctest::Approx(c.dPhi).epsilon(1e-8));
        }
    }
}

TEST_CASE("coherent limit of the squeezed moments") {
    auto c = precision::squeezed_moments({2.0, 0.0}, 0.0);
    CHECK(c.N_p == doctest::Approx(4.0));
    CHECK(c.dNp == doctest::Approx(2.0));
    CHECK(c.dPhi == doctest::Approx(1.0 / 4.0));
}
