#include <catch2/catch_amalgamated.hpp>
#include <sstream>

#include "loopint/forms.hpp"
#include "test_support.hpp"

using namespace loopint;
using testsupport::random_scalar_form;
using testsupport::random_tform;

TEST_CASE("wedge unit and antisymmetry", "[forms]") {
    auto rng = make_stream(1, 1);
    ScalarForm one = ScalarForm::constant(2, 4, 1.0);
    ScalarForm b = random_scalar_form(rng, 2, 4, 1);
    ScalarForm prod = wedge(one, b);
    REQUIRE((prod - b).is_zero(1e-15));

    ScalarForm dx1 = ScalarForm::monomial(2, 4, {0}, {0, 0}, 1.0);
    REQUIRE(wedge(dx1, dx1).is_zero());
}

TEST_CASE("wedge mode convolution", "[forms]") {
    // (e^{2 pi i x_1} dx^1) ^ dx^2 : single coefficient at mode (1,0), index (0,1)
    ScalarForm a = ScalarForm::monomial(2, 4, {0}, {1, 0}, 1.0);
    ScalarForm b = ScalarForm::monomial(2, 4, {1}, {0, 0}, 1.0);
    ScalarForm p = wedge(a, b);
    REQUIRE(p.terms().size() == 1);
    auto it = p.terms().begin();
    REQUIRE(it->first.idx == std::vector<int>{0, 1});
    REQUIRE(it->first.mode == std::vector<int>{1, 0});
    REQUIRE(std::abs(it->second - Complex(1.0, 0.0)) < 1e-15);
}

TEST_CASE("wedge graded commutativity", "[forms]") {
    auto rng = make_stream(2, 0);
    for (int trial = 0; trial < 30; ++trial) {
        int pa = 1 + trial % 2, pb = 1 + (trial / 2) % 2;
        ScalarForm a = random_scalar_form(rng, 3, 3, pa);
        ScalarForm b = random_scalar_form(rng, 3, 3, pb);
        double sign = (pa * pb % 2 == 0) ? 1.0 : -1.0;
        ScalarForm diff = wedge(a, b) - sign * wedge(b, a);
        REQUIRE(diff.is_zero(1e-13));
    }
}

TEST_CASE("exterior derivative basics", "[forms]") {
    REQUIRE(exterior_d(ScalarForm::constant(2, 4, 3.0)).is_zero());

    ScalarForm f = ScalarForm::monomial(2, 4, {}, {1, 0}, 1.0);
    ScalarForm df = exterior_d(f);
    REQUIRE(df.terms().size() == 1);
    auto it = df.terms().begin();
    REQUIRE(it->first.idx == std::vector<int>{0});
    REQUIRE(std::abs(it->second - Complex(0.0, 2.0 * kPi)) < 1e-14);

    auto rng = make_stream(3, 0);
    for (int trial = 0; trial < 20; ++trial) {
        ScalarForm a = random_scalar_form(rng, 3, 3, 1, 2);
        REQUIRE(exterior_d(exterior_d(a)).is_zero(1e-12));
    }
}

TEST_CASE("Leibniz rule", "[forms]") {
    auto rng = make_stream(4, 0);
    for (int trial = 0; trial < 20; ++trial) {
        int pa = trial % 3;  // 0,1,2
        ScalarForm a = random_scalar_form(rng, 3, 3, pa);
        ScalarForm b = random_scalar_form(rng, 3, 3, 1);
        double sign = (pa % 2 == 0) ? 1.0 : -1.0;
        ScalarForm lhs = exterior_d(wedge(a, b));
        ScalarForm rhs = wedge(exterior_d(a), b) + sign * wedge(a, exterior_d(b));
        REQUIRE((lhs - rhs).is_zero(1e-11));
    }
}

TEST_CASE("equivariant differential d_T", "[forms]") {
    // (f, 0) -> (df, 0)
    ScalarForm f = ScalarForm::monomial(2, 4, {}, {1, 1}, Complex(0.3, -0.2));
    TForm v = TForm::from_prime(f);
    TForm dv = d_T(v);
    REQUIRE((dv.prime - exterior_d(f)).is_zero(1e-14));
    REQUIRE(dv.dprime.is_zero());

    // (0, w) -> (-w, -dw)
    ScalarForm w = ScalarForm::monomial(2, 4, {0}, {0, 1}, 1.0);
    TForm u = TForm::from_dprime(w);
    TForm du = d_T(u);
    REQUIRE((du.prime + w).is_zero(1e-14));
    REQUIRE((du.dprime + exterior_d(w)).is_zero(1e-14));

    auto rng = make_stream(5, 0);
    for (int trial = 0; trial < 20; ++trial) {
        TForm t = random_tform(rng, 2, 4, 1 + trial % 2);
        TForm ddt = d_T(d_T(t));
        REQUIRE(ddt.prime.is_zero(1e-11));
        REQUIRE(ddt.dprime.is_zero(1e-11));
    }
}

TEST_CASE("integrate_top selects the zero-mode top coefficient", "[forms]") {
    ScalarForm vol = ScalarForm::monomial(2, 4, {0, 1}, {0, 0}, 1.0);
    REQUIRE(std::abs(integrate_top(vol) - 1.0) < 1e-15);

    ScalarForm osc = ScalarForm::monomial(2, 4, {0, 1}, {1, 0}, 1.0);
    REQUIRE(std::abs(integrate_top(osc)) < 1e-15);

    ScalarForm mixed = ScalarForm::constant(2, 4, 2.0) + 3.0 * vol;
    REQUIRE(std::abs(integrate_top(mixed) - 3.0) < 1e-15);
}

TEST_CASE("Stokes on the torus", "[forms]") {
    auto rng = make_stream(6, 0);
    for (int trial = 0; trial < 20; ++trial) {
        ScalarForm a = random_scalar_form(rng, 2, 4, 1, 2);
        REQUIRE(std::abs(integrate_top(exterior_d(a))) < 1e-12);
    }
}

TEST_CASE("Chern-Weil character", "[forms]") {
    FormMatrix zero = form_matrix_zero(2, 2, 2, 4);
    ScalarForm ch0 = chern_weil_ch(zero, 2);
    REQUIRE(std::abs(integrate_top(ch0)) < 1e-15);
    auto it = ch0.terms().find({{}, {0, 0}});
    REQUIRE(it != ch0.terms().end());
    REQUIRE(std::abs(it->second - 2.0) < 1e-15);

    // rank 1, constant curvature F dx^dy
    const Complex F(0.0, -2.0 * kPi * 3.0);
    FormMatrix r = form_matrix_zero(1, 1, 2, 4);
    r[0][0].add_term({0, 1}, {0, 0}, F);
    ScalarForm ch = chern_weil_ch(r, 1);
    REQUIRE(std::abs(integrate_top(ch) - kChernKappa * F) < 1e-13);

    // additivity over direct sums
    FormMatrix r2 = form_matrix_zero(2, 2, 2, 4);
    r2[0][0] = r[0][0];
    r2[1][1] = r[0][0] * Complex(-0.5);
    ScalarForm chsum = chern_weil_ch(r2, 2);
    ScalarForm cha = chern_weil_ch(r, 1);
    FormMatrix rb = form_matrix_zero(1, 1, 2, 4);
    rb[0][0] = r[0][0] * Complex(-0.5);
    ScalarForm chb = chern_weil_ch(rb, 1);
    REQUIRE((chsum - cha - chb).is_zero(1e-12));

    FormMatrix bad(1, std::vector<ScalarForm>(2, ScalarForm::zero(2, 4)));
    REQUIRE_THROWS_AS(chern_weil_ch(bad, 1), std::invalid_argument);
}

TEST_CASE("A-hat genus", "[forms]") {
    // flat: 1
    FormMatrix zero = form_matrix_zero(2, 2, 2, 4);
    ScalarForm flat = a_hat(zero);
    REQUIRE(std::abs(integrate_top(flat)) < 1e-15);
    auto unit = flat.terms().find({{}, {0, 0}});
    REQUIRE(unit != flat.terms().end());
    REQUIRE(std::abs(unit->second - 1.0) < 1e-15);

    // Synthetic skew curvature on T^4: one rotation block whose angle 2-form
    // squares to a nonzero volume part. The independent oracle is the block
    // expansion of det^{1/2}(S/sinh S) for S = [[0, kappa theta/2], [-.., 0]]:
    // per block 1 + (kappa theta)^2/24 + O(theta^4), so the degree-4
    // coefficient is kappa^2 [theta^2]_top / 24.
    const double a = 0.7, b = -0.4;
    ScalarForm theta = ScalarForm::monomial(4, 2, {0, 1}, {0, 0, 0, 0}, a) +
                       ScalarForm::monomial(4, 2, {2, 3}, {0, 0, 0, 0}, b);
    FormMatrix rm = form_matrix_zero(2, 2, 4, 2);
    rm[0][1] = theta;
    rm[1][0] = theta * Complex(-1.0);
    ScalarForm ah = a_hat(rm);
    const Complex theta_sq_top = integrate_top(wedge(theta, theta));  // 2ab
    REQUIRE(std::abs(theta_sq_top - 2.0 * a * b) < 1e-14);
    Complex expect = kChernKappa * kChernKappa * theta_sq_top / 24.0;
    REQUIRE(std::abs(integrate_top(ah) - expect) < 1e-13);

    // even-degree only
    for (const auto& [key, c] : ah.terms()) REQUIRE(key.idx.size() % 2 == 0);

    FormMatrix notskew = form_matrix_zero(2, 2, 2, 4);
    notskew[0][1] = ScalarForm::monomial(2, 4, {0, 1}, {0, 0}, 1.0);
    REQUIRE_THROWS_AS(a_hat(notskew), std::invalid_argument);
}

TEST_CASE("serialization round-trip", "[forms]") {
    auto rng = make_stream(8, 0);
    ScalarForm f = random_scalar_form(rng, 2, 4, 1, 2, 4);
    f.add_linear_term({1}, 0, Complex(0.25, 0.0));
    std::stringstream ss;
    serialize(f, ss);
    ScalarForm g = deserialize_scalarform(ss);
    REQUIRE((f - g).is_zero(1e-15));
}

TEST_CASE("real-coefficient flag", "[forms]") {
    ScalarForm f(2, 4);
    f.add_term({0}, {1, 0}, Complex(0.5, 0.25));
    f.add_term({0}, {-1, 0}, Complex(0.5, -0.25));
    REQUIRE(f.is_real());
    f.add_term({0}, {0, 1}, Complex(0.0, 1.0));
    REQUIRE_FALSE(f.is_real());
}

TEST_CASE("affine coefficients evaluate on lifted points", "[forms]") {
    // gauge-style form x dy evaluated at a lifted position
    ScalarForm f(2, 4);
    f.add_linear_term({1}, 0, 1.0);
    std::vector<double> x{1.75, 0.3};  // lifted, one winding in the first axis
    auto vals = f.evaluate(x);
    REQUIRE(std::abs(vals.at(std::vector<int>{1}) - Complex(1.75, 0.0)) < 1e-15);
    // d(x dy) = dx ^ dy
    ScalarForm df = exterior_d(f);
    REQUIRE(std::abs(integrate_top(df) - 1.0) < 1e-15);
    // affine-times-affine products are rejected
    REQUIRE_THROWS_AS(wedge(f, f), std::invalid_argument);
}
