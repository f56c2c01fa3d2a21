#include <doctest.h>

#include <cmath>

#include "qgrav/precision.hpp"
#include "qgrav/robustness.hpp"
#include "qgrav/scenario.hpp"

using namespace qgrav;
using namespace qgrav::robustness;

TEST_CASE("deformed loops stay closed") {
    for (auto pattern : {FluctPattern::opposite_x, FluctPattern::adjacent_x,
                         FluctPattern::opposite_p, FluctPattern::p_side}) {
        loops::LoopSpec d = deform(loops::preset("square"), pattern);
        CHECK_NOTHROW(d.validate());
        CHECK(d.net('X').is_zero());
        CHECK(d.net('P').is_zero());
    }
}

TEST_CASE("zero fluctuation leaves no deviation") {
    ExperimentParams p = params_preset("pikovski-gamma");
    FluctuationCase fc;
    fc.assignment.assign(4, std::nullopt);
    fc.epsilon = 0.0;
    auto res = fluctuation_phase(Deformation::gamma, fc, p);
    CHECK(res.deviation.empty());
    CHECK(res.phase_deviation == 0.0);
}

TEST_CASE("single deformed rectangle produces the universal cubic term") {
    // leading deviation 4 k n^3 lambda0^3 eps^3, independent of the model and
    // of which rectangle carries the tooth
    for (auto [model, preset] :
         {std::pair{Deformation::mu, "pikovski-mu"}, {Deformation::gamma, "pikovski-gamma"},
          {Deformation::beta, "pikovski-beta"}}) {
        ExperimentParams p = params_preset(preset);
        auto fc = case_one_of_four(FluctPattern::opposite_x, 1e-4);
        auto res = fluctuation_phase(model, fc, p);
        CHECK(res.leading.eps_pow == 3);
        CHECK(res.leading.k_pow == 1);
        CHECK(res.leading.n_pow == 3);
        CHECK(res.leading.lambda_pow == 3);  // all three carried by the eps pulses
        Coeff mag = Coeff::i() * res.leading_coefficient;
        CHECK((mag == Coeff(4) || mag == Coeff(-4)));
    }
}

TEST_CASE("deviation coefficients come out of the composition, not a lookup") {
    // scaling check: the eps^3 phase deviation scales cubically
    ExperimentParams p = params_preset("pikovski-gamma");
    auto small = fluctuation_phase(Deformation::gamma,
                                   case_one_of_four(FluctPattern::opposite_x, 1e-4), p);
    auto large = fluctuation_phase(Deformation::gamma,
                                   case_one_of_four(FluctPattern::opposite_x, 2e-4), p);
    CHECK(large.phase_deviation ==
          doctest::Approx(8.0 * small.phase_deviation).epsilon(1e-10));
}

TEST_CASE("composite assignments cancel the cubic term") {
    ExperimentParams p = params_preset("pikovski-gamma");
    for (auto fc : {case_all_opposite(1e-4), case_x_parallel(1e-4), case_p_parallel(1e-4)}) {
        auto res = fluctuation_phase(Deformation::gamma, fc, p);
        // conjugated rectangles flip the tooth sign, so the universal k n^3
        // term drops out ofer the four-loop composite
        res.deviation.for_each([&](const Mono& m, const Coeff&) {
            CHECK(!(m.k_pow == 1 && m.n_pow == 3));
        });
        CHECK(res.leading.eps_pow == 3);
        CHECK(res.leading.k_pow >= 2);
    }
}

TEST_CASE("admissible fluctuation thresholds per model") {
    SUBCASE("gamma") {
        ExperimentParams p = params_preset("pikovski-gamma");
        double thr = epsilon_threshold(Deformation::gamma,
                                       case_one_of_four(FluctPattern::opposite_x, 0), p);
        CHECK(thr == doctest::Approx(3.18e-4).epsilon(0.05));
    }
    SUBCASE("beta") {
        ExperimentParams p = params_preset("pikovski-beta");
        double thr = epsilon_threshold(Deformation::beta,
                                       case_single_loop(FluctPattern::opposite_x, 0), p);
        CHECK(thr == doctest::Approx(2.75e-6).epsilon(0.05));
    }
    SUBCASE("mu") {
        ExperimentParams p = params_preset("pikovski-mu");
        double thr = epsilon_threshold(Deformation::mu,
                                       case_single_loop(FluctPattern::opposite_x, 0), p);
        CHECK(thr == doctest::Approx(6.06e-2).epsilon(0.05));
    }
}

TEST_CASE("impure thermal state: published phase offsets") {
    SUBCASE("gamma four-loop") {
        ExperimentParams p = params_preset("pikovski-gamma");
        auto exp = loops::prune_to_splittable(
            precision::preset_exponent("gamma-fourloop", Deformation::gamma),
            TermWeights::from(p, Deformation::gamma));
        auto res = impure_thermal_phase(Deformation::gamma, {1e-3}, exp, p);
        double l0 = p.lambda0(), k = p.k(), N = p.N_p;
        double expect = -std::sqrt(2.0) * k * k * std::pow(l0, 3) * N * N +
                        (40.0 / 3) * std::sqrt(2.0) * std::pow(k, 3) * std::pow(l0, 4) *
                            std::pow(N, 3);
        CHECK(res.theta_minus_phi == doctest::Approx(expect).epsilon(1e-2));
        CHECK(res.admissible);
    }
    SUBCASE("mu vertex loop") {
        ExperimentParams p = params_preset("improved-mu");
        auto exp = loops::prune_to_splittable(
            precision::preset_exponent("mu-vertex", Deformation::mu),
            TermWeights::from(p, Deformation::mu));
        auto res = impure_thermal_phase(Deformation::mu, {1e-3}, exp, p);
        double l0 = p.lambda0(), k = p.k(), N = p.N_p;
        double expect = -2 * std::sqrt(2.0) * k * l0 * l0 * N +
                        (3.0 / std::sqrt(2.0)) * k * k * std::pow(l0, 3) * N * N;
        CHECK(res.theta_minus_phi == doctest::Approx(expect).epsilon(1e-2));
    }
    SUBCASE("zero impurity is trivially admissible") {
        ExperimentParams p = params_preset("pikovski-gamma");
        auto exp = loops::prune_to_splittable(
            precision::preset_exponent("gamma-fourloop", Deformation::gamma),
            TermWeights::from(p, Deformation::gamma));
        auto res = impure_thermal_phase(Deformation::gamma, {0.0}, exp, p);
        CHECK(res.phase_correction == 0.0);
        CHECK(res.admissible);
    }
}

TEST_CASE("impurity correction is linear in the mixing weight") {
    ExperimentParams p = params_preset("pikovski-gamma");
    p.N_p = 1e6;  // desk scale so the windowed sum is cheap
    auto exp = loops::prune_to_splittable(
        precision::preset_exponent("gamma-fourloop", Deformation::gamma),
        TermWeights::from(p, Deformation::gamma));
    auto r1 = impure_thermal_phase(Deformation::gamma, {1e-3}, exp, p);
    auto r2 = impure_thermal_phase(Deformation::gamma, {2e-3}, exp, p);
    CHECK(r2.phase_correction == doctest::Approx(2.0 * r1.phase_correction).epsilon(1e-9));

    // slope against a two-point finite difference of the full mean field
    meanfield::EvalOptions opt;
    opt.model = Deformation::gamma;
    opt.qg_value = 0.0;
    auto thermal = meanfield::exact_sum(exp, p, opt, 10.0, meanfield::MechState::thermal);
    auto pure = meanfield::exact_sum(exp, p, opt, 10.0, meanfield::MechState::plus_superposition);
    auto mix_phase = [&](double eps) {
        std::complex<double> a =
            thermal.amplitude * std::exp(std::complex<double>(0, -thermal.phase_principal));
        std::complex<double> b =
            pure.amplitude * std::exp(std::complex<double>(0, -pure.phase_principal));
        return -std::arg((a + eps * b) / (1.0 + eps));
    };
    double h = 1e-4;
    double slope_fd = (mix_phase(h) - mix_phase(0.0)) / h;
    auto tiny = impure_thermal_phase(Deformation::gamma, {h}, exp, p);
    double slope_formula = tiny.phase_correction / h;
    CHECK(slope_fd == doctest::Approx(slope_formula).epsilon(0.05));
}
