#pragma once

// Shared fixtures: seeded random forms, chains, and loops for property tests.

#include <random>
#include <vector>

#include "loopint/barcplx.hpp"
#include "loopint/forms.hpp"
#include "loopint/loops.hpp"
#include "loopint/rng.hpp"

namespace testsupport {

using namespace loopint;

inline ScalarForm random_scalar_form(std::mt19937_64& rng, int n, int lambda, int degree, int max_mode = 1,
                                     int terms = 3) {
    std::uniform_int_distribution<int> mode_dist(-max_mode, max_mode);
    std::uniform_int_distribution<int> idx_dist(0, n - 1);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    ScalarForm f(n, lambda);
    for (int t = 0; t < terms; ++t) {
        std::vector<int> idx;
        while (static_cast<int>(idx.size()) < degree) {
            int candidate = idx_dist(rng);
            bool dup = false;
            for (int i : idx) dup |= (i == candidate);
            if (!dup) idx.push_back(candidate);
        }
        std::vector<int> mode(n);
        for (int j = 0; j < n; ++j) mode[j] = mode_dist(rng);
        f.add_term(idx, mode, Complex(coeff(rng), coeff(rng)));
    }
    return f;
}

inline TForm random_tform(std::mt19937_64& rng, int n, int lambda, int degree, int max_mode = 1) {
    ScalarForm prime = ScalarForm::zero(n, lambda);
    ScalarForm dprime = ScalarForm::zero(n, lambda);
    if (degree <= n) prime = random_scalar_form(rng, n, lambda, degree, max_mode, 2);
    if (degree >= 1 && degree - 1 <= n) dprime = random_scalar_form(rng, n, lambda, degree - 1, max_mode, 2);
    return TForm(prime, dprime);
}

inline BarChain random_chain(std::mt19937_64& rng, int n, int lambda, int max_len, int max_degree,
                             int terms = 2, int max_mode = 1) {
    std::uniform_int_distribution<int> len_dist(1, max_len);
    std::uniform_int_distribution<int> deg_dist(1, max_degree);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    BarChain c;
    for (int t = 0; t < terms; ++t) {
        int len = len_dist(rng);
        std::vector<TForm> word;
        word.reserve(len);
        for (int s = 0; s < len; ++s) word.push_back(random_tform(rng, n, lambda, deg_dist(rng), max_mode));
        c.terms.push_back({Complex(coeff(rng), coeff(rng)), std::move(word)});
    }
    return c;
}

/// Smooth test loop with prescribed winding and trigonometric wiggle.
inline DiscreteLoop wiggly_loop(int n, int M, const std::vector<int>& winding, double amp = 0.15,
                                unsigned phase_seed = 0) {
    auto rng = make_stream(phase_seed, 99);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> phase(n), amp2(n), base(n);
    for (int j = 0; j < n; ++j) {
        phase[j] = unif(rng);
        amp2[j] = amp * (0.3 + 0.7 * unif(rng));
        base[j] = unif(rng);
    }
    return DiscreteLoop::sample(
        n, M,
        [=](double t) {
            std::vector<double> x(n);
            for (int j = 0; j < n; ++j)
                x[j] = base[j] + winding[j] * t + amp * std::sin(2 * kPi * (t + phase[j])) +
                       amp2[j] * std::cos(4 * kPi * (t + 0.5 * phase[j]));
            return x;
        },
        winding);
}

}  // namespace testsupport
