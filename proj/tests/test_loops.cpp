#include <doctest.h>

#include <random>

#include "qgrav/loops.hpp"

using namespace qgrav;
using namespace qgrav::loops;

namespace {

Coeff isq(long long q, int ipow, int spow) { return Coeff::make(Rat(q), ipow, spow); }

}  // namespace

TEST_CASE("hamiltonians alternate sign in the cavity-ratio expansion") {
    AlgebraContext ctx{Basis::quadrature, Deformation::none, Truncation{}};
    auto [hx, hp] = build_hamiltonians(2, ctx);
    CHECK(hx.coefficient({1, 0, 1, 0, 1, 0, 0}) == Coeff(1));
    CHECK(hx.coefficient({1, 0, 2, 1, 1, 0, 0}) == Coeff(-1));
    CHECK(hx.coefficient({1, 0, 3, 2, 1, 0, 0}) == Coeff(1));
    CHECK(hp.coefficient({1, 3, 0, 2, 1, 0, 0}) == Coeff(1));
    CHECK(hx.size() == 3);
    // zero coupling evaluates to the zero polynomial
    TermWeights w;
    w.lambda0 = 0;
    w.k = 0.1;
    w.N_p = 10;
    hx.for_each([&](const Mono& m, const Coeff& c) {
        CHECK(w.term_magnitude(m, std::abs(c.to_complex())) == 0.0);
    });
}

TEST_CASE("square loop with canonical commutator collapses to the area term") {
    auto e = compose(preset("square"), Deformation::none, 6, 0);
    REQUIRE(e.exponent.size() == 1);
    CHECK(e.exponent.coefficient({2, 0, 0, 0, 2, 0, 0}) == -Coeff::i());
}

TEST_CASE("square loop four-displacement under the beta deformation") {
    auto e = compose(preset("square"), Deformation::beta, 6, 0);
    // -i lam^2 n^2 - i beta (lam^2 n^2 P^2 + lam^3 n^3 P + 1/3 lam^4 n^4)
    REQUIRE(e.exponent.size() == 4);
    CHECK(e.exponent.coefficient({2, 0, 0, 0, 2, 0, 0}) == -Coeff::i());
    CHECK(e.exponent.coefficient({2, 2, 0, 0, 2, 1, 0}) == -Coeff::i());
    CHECK(e.exponent.coefficient({3, 1, 0, 0, 3, 1, 0}) == -Coeff::i());
    CHECK(e.exponent.coefficient({4, 0, 0, 0, 4, 1, 0}) == Coeff(Rat(0), Rat(-1, 3)));
}

TEST_CASE("square loop, third-order hamiltonian: ladder-basis coefficients") {
    auto e = compose(preset("square"), Deformation::none, 6, 2);
    Poly lad = to_ladder(e.exponent);
    // pure-n part: -i(lam^2 n^2 - 2 k lam^3 n^3 + 4 k^2 lam^4 n^4)
    CHECK(lad.coefficient({2, 0, 0, 0, 2, 0, 0}) == -Coeff::i());
    CHECK(lad.coefficient({3, 0, 0, 1, 3, 0, 0}) == isq(2, 1, 0));
    CHECK(lad.coefficient({4, 0, 0, 2, 4, 0, 0}) == isq(-4, 1, 0));
    // displacement amplitudes: sqrt2 k lam^2 n^2 and (7/sqrt2) k^2 lam^3 n^3
    CHECK(lad.coefficient({2, 0, 1, 1, 2, 0, 0}) == isq(1, 0, 1) + isq(1, 1, 1));
    CHECK(lad.coefficient({2, 1, 0, 1, 2, 0, 0}) == isq(-1, 0, 1) + isq(1, 1, 1));
    CHECK(lad.coefficient({3, 0, 1, 2, 3, 0, 0}) == isq(-7, 0, -1) + isq(-7, 1, -1));
    CHECK(lad.coefficient({3, 1, 0, 2, 3, 0, 0}) == isq(7, 0, -1) + isq(-7, 1, -1));
    CHECK(e.exponent.is_anti_hermitian());
}

TEST_CASE("vertex loop drops the odd pure terms and keeps the n^6 one") {
    auto e = compose(preset("mu-vertex"), Deformation::mu, 6, 2);
    Poly lad = to_ladder(e.exponent);
    CHECK(lad.coefficient({2, 0, 0, 0, 2, 0, 0}) == -Coeff::i());
    CHECK(lad.coefficient({2, 0, 0, 0, 2, 1, 0}) == -Coeff::i());  // mu signal
    CHECK(lad.coefficient({3, 0, 0, 1, 3, 0, 0}).is_zero());
    CHECK(lad.coefficient({4, 0, 0, 2, 4, 0, 0}).is_zero());
    CHECK(lad.coefficient({6, 0, 0, 4, 6, 0, 0}) == Coeff(Rat(0), Rat(-35, 6)));
    // n^3 displacement differs from the square loop's by the vertex choice
    CHECK(lad.coefficient({3, 0, 1, 2, 3, 0, 0}) == isq(1, 0, -1) + isq(-1, 1, -1));
}

TEST_CASE("composite gamma path cancels the leading QM terms") {
    auto [parts, dagger] = gamma_fourloop_parts();
    auto e = compose_parts(parts, dagger, Deformation::gamma, 6, 3, 2);
    Poly lad = to_ladder(e.exponent);
    // cancelled: n^2 lam^2, n^3 lam^3 k, n^4 lam^4 k^2 pure terms and the
    // n^2 displacement
    CHECK(lad.coefficient({2, 0, 0, 0, 2, 0, 0}).is_zero());
    CHECK(lad.coefficient({3, 0, 0, 1, 3, 0, 0}).is_zero());
    CHECK(lad.coefficient({4, 0, 0, 2, 4, 0, 0}).is_zero());
    CHECK(lad.coefficient({2, 0, 1, 1, 2, 0, 0}).is_zero());
    // surviving signal term: -(i/3) gamma lam^3 n^3
    CHECK(lad.coefficient({3, 0, 0, 0, 3, 1, 0}) == Coeff(Rat(0), Rat(-1, 3)));
    // retained pure QM terms
    CHECK(lad.coefficient({5, 0, 0, 3, 5, 0, 0}) == Coeff(Rat(0), Rat(40, 3)));
    CHECK(lad.coefficient({6, 0, 0, 4, 6, 0, 0}) == isq(-24, 1, 0));
    CHECK(lad.coefficient({7, 0, 0, 5, 7, 0, 0}) == Coeff(Rat(0), Rat(-232, 3)));
    // n^3 and n^4 displacement amplitudes
    CHECK(lad.coefficient({3, 0, 1, 2, 3, 0, 0}) ==
          Coeff::make(Rat(-1, 3), 0, 1) + Coeff::make(Rat(1, 3), 1, 1));
    CHECK(lad.coefficient({4, 0, 1, 3, 4, 0, 0}) ==
          Coeff::make(Rat(26, 3), 0, 1) + Coeff::make(Rat(-10, 3), 1, 1));
}

TEST_CASE("loop closure: closed loops at zero cavity ratio are pure photon terms") {
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> pick(0, 5);
    const Rat scales[6] = {Rat(1), Rat(-1), Rat(1, 2), Rat(-1, 2), Rat(1, 3), Rat(-1, 3)};
    for (int it = 0; it < 25; ++it) {
        LoopSpec loop;
        loop.name = "random";
        Rat nx(0), np(0);
        for (int s = 0; s < 6; ++s) {
            PulseStep st;
            st.axis = (s % 2 == 0) ? 'X' : 'P';
            st.scale = scales[pick(rng)];
            (st.axis == 'X' ? nx : np) += st.scale;
            loop.steps.push_back(st);
        }
        // close the loop explicitly
        if (!nx.is_zero()) loop.steps.push_back({'X', -nx});
        if (!np.is_zero()) loop.steps.push_back({'P', -np});
        loop.validate();
        auto e = compose(loop, Deformation::none, 5, 0);
        e.exponent.for_each([&](const Mono& m, const Coeff&) { CHECK(m.word_length() == 0); });
    }
}

TEST_CASE("reversal: a loop followed by its inverse cancels") {
    LoopSpec loop = preset("square");
    LoopSpec inverse;
    inverse.name = "inverse";
    inverse.steps = loop.steps;
    std::reverse(inverse.steps.begin(), inverse.steps.end());
    for (auto& st : inverse.steps) st.scale = -st.scale;
    LoopSpec both;
    both.name = "both";
    both.steps = loop.steps;
    both.steps.insert(both.steps.end(), inverse.steps.begin(), inverse.steps.end());
    for (int k_order : {0, 2}) {
        auto e = compose(both, Deformation::beta, 5, k_order);
        CHECK(e.exponent.empty());
    }
}

TEST_CASE("prune thresholds and provenance") {
    ExperimentParams p;
    p.finesse = 4e5;
    p.mass = 1e-7;
    p.N_p = 1e14;
    p.lambda_L = 532e-9;
    auto w = TermWeights::from(p, Deformation::gamma);
    auto e = compose(preset("square"), Deformation::gamma, 6, 2);

    SUBCASE("threshold zero is the identity") {
        auto pr = prune(e, w, 0.0);
        CHECK(pr.exponent == e.exponent);
        CHECK(pr.provenance.pruned_magnitudes.empty());
    }
    SUBCASE("infinite threshold clears the exponent and records everything") {
        auto pr = prune(e, w, std::numeric_limits<double>::infinity());
        CHECK(pr.exponent.empty());
        CHECK(pr.provenance.pruned_magnitudes.size() == e.exponent.size());
    }
    SUBCASE("published retention at the minimum uncertainty") {
        double thr = 5e-10;
        auto pr = prune(e, w, thr);
        Poly lad = to_ladder(pr.exponent);
        // the displayed terms survive
        CHECK(!lad.coefficient({2, 0, 0, 0, 2, 0, 0}).is_zero());
        CHECK(!lad.coefficient({3, 0, 0, 1, 3, 0, 0}).is_zero());
        CHECK(!lad.coefficient({4, 0, 0, 2, 4, 0, 0}).is_zero());
        CHECK(!lad.coefficient({2, 0, 1, 1, 2, 0, 0}).is_zero());
        CHECK(!lad.coefficient({3, 0, 1, 2, 3, 0, 0}).is_zero());
        // provenance soundness: every dropped magnitude is below threshold
        for (double m : pr.provenance.pruned_magnitudes) CHECK(m < thr);
        double sum = 0;
        for (double m : pr.provenance.pruned_magnitudes) sum += m;
        CHECK(sum < thr * double(pr.provenance.pruned_magnitudes.size()));
    }
    SUBCASE("splittable pruning keeps only short mechanical words") {
        auto pr = prune_to_splittable(e, w);
        pr.exponent.for_each([&](const Mono& m, const Coeff&) { CHECK(m.word_length() <= 1); });
        CHECK(!pr.provenance.pruned_magnitudes.empty());
    }
}

TEST_CASE("required series orders per model") {
    ExperimentParams gamma;
    gamma.finesse = 2e5;
    gamma.mass = 1e-9;
    gamma.N_p = 5e10;
    auto ro = required_orders(gamma, 1);
    CHECK(ro.bch_order == 6);
    CHECK(ro.k_order == 4);

    ExperimentParams mu;
    mu.finesse = 1e5;
    mu.mass = 1e-11;
    mu.N_p = 1e8;
    ro = required_orders(mu, 1e5);
    CHECK(ro.bch_order == 5);
    CHECK(ro.k_order == 3);

    ExperimentParams beta;
    beta.finesse = 4e5;
    beta.mass = 1e-7;
    beta.N_p = 1e14;
    beta.lambda_L = 532e-9;
    try {
        required_orders(beta, 1e19);
        FAIL("expected order_out_of_range");
    } catch (const order_out_of_range& err) {
        CHECK(err.required_order == 28);
    }
}

TEST_CASE("loop spec json round trip") {
    LoopSpec loop = preset("gamma-fourloop");
    LoopSpec back = LoopSpec::from_json(loop.to_json());
    CHECK(back.name == loop.name);
    REQUIRE(back.steps.size() == loop.steps.size());
    for (size_t i = 0; i < loop.steps.size(); ++i) CHECK(back.steps[i] == loop.steps[i]);
}

TEST_CASE("open loops require the override flag") {
    LoopSpec open;
    open.name = "open";
    open.steps = {{'X', Rat(1)}, {'P', Rat(1)}};
    CHECK_THROWS_AS(open.validate(), config_error);
    open.allow_open = true;
    CHECK_NOTHROW(open.validate());
}
