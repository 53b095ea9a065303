#include <catch2/catch_amalgamated.hpp>

#include "loopint/barcplx.hpp"
#include "test_support.hpp"

using namespace loopint;
using testsupport::random_chain;
using testsupport::random_tform;

namespace {

double residual(const BarChain& c, double scale) { return chain_abs_max(c) / std::max(scale, 1e-30); }

}  // namespace

TEST_CASE("bar_d on single words", "[barcplx]") {
    // single word (v): sign (-1)^{n_0} = +1, slotwise d_T
    ScalarForm f = ScalarForm::monomial(2, 4, {}, {1, 0}, 1.0);
    BarChain c = BarChain::single(1.0, {TForm::from_prime(f)});
    BarChain dc = bar_d(c);
    REQUIRE(dc.terms.size() == 1);
    REQUIRE((dc.terms[0].word[0].prime - exterior_d(f)).is_zero(1e-14));
    REQUIRE(std::abs(dc.terms[0].coeff - Complex(1.0, 0.0)) < 1e-15);

    REQUIRE(bar_d(BarChain::single(1.0, {})).terms.empty());
}

TEST_CASE("bar_bprime basics", "[barcplx]") {
    // length-1 words map to zero
    ScalarForm f = ScalarForm::monomial(2, 4, {}, {1, 0}, 1.0);
    REQUIRE(bar_bprime(BarChain::single(1.0, {TForm::from_prime(f)})).terms.empty());

    // (f, g) for degree-0 functions: n_1 = -1, so the sign is -(-1)^{-1} = +1
    ScalarForm g = ScalarForm::monomial(2, 4, {}, {0, 1}, Complex(0.0, 2.0));
    BarChain c = BarChain::single(1.0, {TForm::from_prime(f), TForm::from_prime(g)});
    BarChain bc = bar_bprime(c);
    REQUIRE(bc.terms.size() == 1);
    REQUIRE(bc.terms[0].word.size() == 1);
    REQUIRE((bc.terms[0].word[0].prime - wedge(f, g)).is_zero(1e-14));
    REQUIRE(std::abs(bc.terms[0].coeff - Complex(1.0, 0.0)) < 1e-15);
}

TEST_CASE("differential identities on random chains", "[barcplx]") {
    auto rng = make_stream(11, 0);
    for (int trial = 0; trial < 200; ++trial) {
        BarChain c = random_chain(rng, 2, 4, 4, 3);
        double scale = std::max(chain_abs_max(bar_d(c)), chain_abs_max(bar_bprime(c)));
        scale = std::max(scale, 1.0);
        REQUIRE(residual(bar_d(bar_d(c)), scale) < 1e-12);
        REQUIRE(residual(bar_bprime(bar_bprime(c)), scale) < 1e-12);
        BarChain mixed = bar_d(bar_bprime(c));
        mixed += bar_bprime(bar_d(c));
        REQUIRE(residual(mixed, scale) < 1e-12);
        REQUIRE(residual(bar_total(bar_total(c)), scale) < 1e-12);
    }
}

TEST_CASE("cyclic projection is idempotent and commutes with the total differential", "[barcplx]") {
    auto rng = make_stream(12, 0);
    for (int trial = 0; trial < 60; ++trial) {
        BarChain c = random_chain(rng, 2, 4, 3, 2);
        BarChain p = cyclic_project(c);
        REQUIRE(p.cyclic);
        BarChain pp = cyclic_project(p);
        BarChain diff = pp;
        diff += p * Complex(-1.0);
        double scale = std::max(chain_abs_max(p), 1e-6);
        REQUIRE(chain_abs_max(diff) / scale < 1e-12);

        BarChain left = bar_total(cyclic_project(c));
        BarChain right = cyclic_project(bar_total(cyclic_project(c)));
        BarChain comm = left;
        comm += right * Complex(-1.0);
        double s2 = std::max(chain_abs_max(left), 1e-6);
        REQUIRE(chain_abs_max(comm) / s2 < 1e-12);
    }
}

TEST_CASE("codifferential", "[barcplx]") {
    auto rng = make_stream(13, 0);
    auto zero_cochain = [](const BarChain&) { return Complex{}; };
    BarChain c = random_chain(rng, 2, 4, 3, 2);
    REQUIRE(std::abs(apply_codifferential(zero_cochain, c)) < 1e-15);

    // linear fingerprint cochain; delta delta L = 0 via (d+b')^2 = 0
    auto fingerprint = [](const BarChain& chain) {
        Complex s{};
        for (const auto& [key, coeff] : expand_basis(chain)) {
            double w = 0.0;
            for (char ch : key) w += static_cast<double>(ch) * 0.013;
            s += coeff * std::sin(w);
        }
        return s;
    };
    for (int trial = 0; trial < 20; ++trial) {
        BarChain x = random_chain(rng, 2, 4, 3, 2);
        auto delta_l = [&](const BarChain& chain) { return apply_codifferential(fingerprint, chain); };
        Complex dd = apply_codifferential(delta_l, x);
        REQUIRE(std::abs(dd) < 1e-10);
    }

    // cocycle input evaluates to zero
    ScalarForm f = ScalarForm::monomial(2, 4, {}, {1, 0}, 1.0);
    BarChain cocycle = BarChain::single(1.0, {TForm::from_prime(f)});
    BarChain closed = bar_total(bar_total(cocycle));
    REQUIRE(chain_abs_max(closed) < 1e-12);
}

TEST_CASE("growth diagnostic", "[barcplx]") {
    // all-zero sequence
    ChainSequence zero;
    zero.components.assign(8, BarChain::zero());
    REQUIRE_FALSE(growth_diagnostic(zero).divergent);

    // norm_N = N! designed failure
    ChainSequence bad;
    double factorial = 1.0;
    for (int N = 0; N < 9; ++N) {
        if (N > 0) factorial *= N;
        BarChain c;
        std::vector<TForm> word;
        for (int s = 0; s < N; ++s)
            word.push_back(TForm::from_prime(ScalarForm::constant(2, 4, 1.0)));
        c.terms.push_back({Complex(factorial, 0.0), word});
        bad.components.push_back(c);
    }
    REQUIRE(growth_diagnostic(bad).divergent);

    // geometric pattern C^N stays within the entire regime
    ChainSequence geo;
    for (int N = 0; N < 9; ++N) {
        BarChain c;
        std::vector<TForm> word;
        for (int s = 0; s < N; ++s)
            word.push_back(TForm::from_prime(ScalarForm::constant(2, 4, 1.0)));
        c.terms.push_back({Complex(std::pow(2.5, N), 0.0), word});
        geo.components.push_back(c);
    }
    REQUIRE_FALSE(growth_diagnostic(geo).divergent);
}
