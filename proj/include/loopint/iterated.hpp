#pragma once

// Pointwise evaluation of the extended iterated integral map on discretized
// loops:
//   rho(v_1,..,v_N)_gamma = int_{Delta_N} prod_a ( i_K v_a'(tau_a) + v_a''(tau_a) )
// evaluated on tangent fields by antisymmetrized wedge expansion, and the
// finite-difference verification of the chain-map property
//   d_K rho = rho (d_T + b'),
// which holds on cyclic chains. The exterior derivative on the loop space is
// taken in the flat-torus trivialization: constant vector-field extensions,
// vanishing brackets, so d reduces to directional derivatives.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "barcplx.hpp"
#include "forms.hpp"
#include "loops.hpp"
#include "quadrature.hpp"

namespace loopint {

namespace detail {

/// Loop-space degree sum_a (|v_a| - 1) of a homogeneous word; -1 when a slot
/// kills the word (degree-0 slot has no i_K or v'' contribution).
inline int word_loop_degree(const std::vector<TForm>& word) {
    int total = 0;
    for (const auto& slot : word) {
        int deg = slot.degree();
        if (deg == 0) return -1;
        total += deg - 1;
    }
    return total;
}

struct TangentValues {
    // tangent vectors evaluated at a fixed time, plus the velocity
    std::vector<double> velocity;
    std::vector<std::vector<double>> vectors;
};

/// ( i_K v'(tau) + v''(tau) ) evaluated on an ordered tuple of tangent values.
inline Complex slot_factor(const TForm& slot, const std::vector<double>& x,
                           const std::vector<double>& velocity,
                           const std::vector<std::vector<double>>& args) {
    Complex total{};
    if (!slot.prime.is_zero()) {
        std::vector<std::vector<double>> with_k;
        with_k.reserve(args.size() + 1);
        with_k.push_back(velocity);
        for (const auto& a : args) with_k.push_back(a);
        total += slot.prime.eval_on(x, with_k);
    }
    if (!slot.dprime.is_zero()) total += slot.dprime.eval_on(x, args);
    return total;
}

inline double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace detail

/// Evaluate rho(c) at a loop on a tuple of tangent fields. Components whose
/// loop degree differs from the tangent count vanish; a chain that is
/// homogeneous of a single mismatched degree is rejected.
inline Complex rho_eval(const BarChain& c, const DiscreteLoop& loop,
                        const std::vector<TangentField>& tangents, int quad_order = 8) {
    if (!loop.smooth_flag) throw std::invalid_argument("rho_eval: loop must be smooth");
    const int want = static_cast<int>(tangents.size());

    // split every slot into homogeneous components first
    std::vector<std::pair<Complex, std::vector<TForm>>> words;
    for (const auto& term : c.terms) {
        std::vector<std::pair<Complex, std::vector<TForm>>> partial{{term.coeff, {}}};
        for (const auto& slot : term.word) {
            std::vector<std::pair<Complex, std::vector<TForm>>> next;
            for (const auto& piece : slot.split_homogeneous())
                for (const auto& [coeff, word] : partial) {
                    auto extended = word;
                    extended.push_back(piece);
                    next.emplace_back(coeff, std::move(extended));
                }
            if (slot.is_zero()) next.clear();
            partial = std::move(next);
        }
        for (auto& w : partial) words.push_back(std::move(w));
    }

    bool any_match = false;
    int seen_degree = -2;
    bool uniform_degree = true;
    for (const auto& [coeff, word] : words) {
        int deg = detail::word_loop_degree(word);
        if (deg == want) any_match = true;
        if (seen_degree == -2)
            seen_degree = deg;
        else if (deg != seen_degree)
            uniform_degree = false;
    }
    if (!any_match && uniform_degree && !words.empty() && seen_degree >= 0)
        throw std::invalid_argument("rho_eval: tangent count does not match the form degree");

    Complex total{};
    for (const auto& [coeff, word] : words) {
        const int N = static_cast<int>(word.size());
        if (detail::word_loop_degree(word) != want) continue;
        if (N == 0) {
            total += coeff;  // empty word is the constant function 1
            continue;
        }
        std::vector<int> degrees(N);
        double block_factorials = 1.0;
        for (int a = 0; a < N; ++a) {
            degrees[a] = word[a].degree() - 1;
            block_factorials *= detail::factorial(degrees[a]);
        }

        auto integrand = [&](const std::vector<double>& tau) -> Complex {
            std::vector<std::vector<double>> x(N), vel(N);
            for (int a = 0; a < N; ++a) {
                x[a] = loop.position(tau[a]);
                vel[a] = loop.velocity(tau[a]);
            }
            std::vector<std::vector<std::vector<double>>> tvals(N);
            for (int a = 0; a < N; ++a) {
                tvals[a].resize(want);
                for (int t = 0; t < want; ++t) tvals[a][t] = tangents[t].value(tau[a]);
            }
            // antisymmetrized wedge: sum over permutations of tangent slots
            std::vector<int> perm(want);
            for (int i = 0; i < want; ++i) perm[i] = i;
            Complex acc{};
            std::function<void(int, int)> rec = [&](int k, int sign) {
                if (k == want) {
                    Complex prod{1.0, 0.0};
                    int cursor = 0;
                    for (int a = 0; a < N && prod != Complex{}; ++a) {
                        std::vector<std::vector<double>> args(degrees[a]);
                        for (int j = 0; j < degrees[a]; ++j) args[j] = tvals[a][perm[cursor + j]];
                        cursor += degrees[a];
                        prod *= detail::slot_factor(word[a], x[a], vel[a], args);
                    }
                    acc += static_cast<double>(sign) * prod;
                    return;
                }
                for (int i = k; i < want; ++i) {
                    std::swap(perm[k], perm[i]);
                    rec(k + 1, i == k ? sign : -sign);
                    std::swap(perm[k], perm[i]);
                }
            };
            rec(0, 1);
            return acc / block_factorials;
        };
        total += coeff * integrate_simplex_gauss(N, quad_order, integrand);
    }
    return total;
}

struct ChainMapResidual {
    double d_part = 0.0;     // |d rho(c) - rho((d_T+b')c)|_{deg+1}
    double iota_part = 0.0;  // |i_K rho(c) - rho((d_T+b')c)|_{deg-1}
    double total() const { return d_part + iota_part; }
};

/// Central-difference check of d_K rho(c) = rho((d_T + b')c) on a cyclic
/// chain whose rho-image is homogeneous of degree `deg`. `tangents` must
/// supply deg+1 fields; the insertion part uses the first deg-1 of them.
inline ChainMapResidual chainmap_residual(const BarChain& c, const DiscreteLoop& loop,
                                          const std::vector<TangentField>& tangents, int deg,
                                          double h = 1e-3, int quad_order = 8) {
    if (static_cast<int>(tangents.size()) < deg + 1)
        throw std::invalid_argument("chainmap_residual: need deg+1 tangent fields");
    BarChain dc = bar_total(c);

    ChainMapResidual res;

    // raising part: d rho(c) via central differences along constant extensions
    {
        std::vector<TangentField> args(tangents.begin(), tangents.begin() + deg + 1);
        Complex fd{};
        for (int j = 0; j <= deg; ++j) {
            std::vector<TangentField> rest;
            for (int i = 0; i <= deg; ++i)
                if (i != j) rest.push_back(args[i]);
            auto shift_loop = [&](double s) {
                DiscreteLoop shifted = loop;
                for (std::size_t i = 0; i < shifted.points.size(); ++i) {
                    auto v = args[j].value(shifted.grid[i]);
                    for (int d2 = 0; d2 < shifted.n; ++d2) shifted.points[i][d2] += s * v[d2];
                }
                return shifted;
            };
            Complex plus = rho_eval(c, shift_loop(h), rest, quad_order);
            Complex minus = rho_eval(c, shift_loop(-h), rest, quad_order);
            double sign = (j % 2 == 0) ? 1.0 : -1.0;
            fd += sign * (plus - minus) / (2.0 * h);
        }
        Complex target = rho_eval(dc, loop, args, quad_order);
        res.d_part = std::abs(fd - target);
    }

    // insertion part: i_K rho(c) = rho(c)[gamma-dot, ...]
    if (deg >= 1) {
        std::vector<TangentField> rest(tangents.begin(), tangents.begin() + deg - 1);
        TangentField k_field = TangentField::sample(loop, [&](double t) { return loop.velocity(t); });
        std::vector<TangentField> with_k;
        with_k.push_back(k_field);
        for (const auto& t : rest) with_k.push_back(t);
        Complex lhs = rho_eval(c, loop, with_k, quad_order);
        Complex target = rho_eval(dc, loop, rest, quad_order);
        res.iota_part = std::abs(lhs - target);
    } else {
        // deg = 0: the lowered component pairs with no tangents
        Complex target = rho_eval(dc, loop, {}, quad_order);
        res.iota_part = std::abs(target);
    }
    return res;
}

}  // namespace loopint
