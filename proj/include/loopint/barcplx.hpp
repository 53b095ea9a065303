#pragma once

// The bar complex B(Omega_T(X)) at desk scale: formal linear combinations of
// tensor words of TForms, the slotwise differential d, the bar differential
// b', the graded cyclic projection, and entire-growth diagnostics.
//
// Degree bookkeeping uses n_k = |v_1| + ... + |v_k| - k over word prefixes;
// slot degrees are the homogeneous TForm degrees. Chains are kept as raw term
// lists; identity tests reduce them to the tensor-monomial basis where
// cancellation is exact.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "forms.hpp"

namespace loopint {

struct BarTerm {
    Complex coeff{1.0, 0.0};
    std::vector<TForm> word;
};

struct BarChain {
    std::vector<BarTerm> terms;
    bool cyclic = false;

    static BarChain zero() { return BarChain{}; }

    static BarChain single(Complex coeff, std::vector<TForm> word) {
        BarChain c;
        c.terms.push_back({coeff, std::move(word)});
        return c;
    }

    BarChain& operator+=(const BarChain& o) {
        terms.insert(terms.end(), o.terms.begin(), o.terms.end());
        cyclic = cyclic && o.cyclic;
        return *this;
    }

    BarChain operator*(Complex s) const {
        BarChain out = *this;
        for (auto& t : out.terms) t.coeff *= s;
        return out;
    }

    std::size_t max_word_length() const {
        std::size_t m = 0;
        for (const auto& t : terms) m = std::max(m, t.word.size());
        return m;
    }
};

namespace detail {

/// Slot grading for signs; only the parity of |v| enters the bar differentials.
inline int slot_degree(const TForm& v) { return v.parity(); }

/// Parities of n_k for k = 0..N over a word (n_0 = 0).
inline std::vector<int> degree_prefixes(const std::vector<TForm>& word) {
    std::vector<int> n(word.size() + 1, 0);
    for (std::size_t k = 0; k < word.size(); ++k)
        n[k + 1] = (n[k] + slot_degree(word[k]) + 1) % 2;
    return n;
}

inline double parity(int e) { return (e % 2 == 0) ? 1.0 : -1.0; }

}  // namespace detail

/// Slotwise d_T with sign (-1)^{n_{k-1}}.
inline BarChain bar_d(const BarChain& c) {
    BarChain out;
    out.cyclic = false;
    for (const auto& t : c.terms) {
        auto n = detail::degree_prefixes(t.word);
        for (std::size_t k = 0; k < t.word.size(); ++k) {
            TForm dv = d_T(t.word[k]);
            if (dv.is_zero()) continue;
            BarTerm nt = t;
            nt.coeff *= detail::parity(n[k]);
            nt.word[k] = std::move(dv);
            out.terms.push_back(std::move(nt));
        }
    }
    return out;
}

/// Adjacent-slot multiplication with sign -(-1)^{n_k}; length-1 words map to 0.
inline BarChain bar_bprime(const BarChain& c) {
    BarChain out;
    out.cyclic = false;
    for (const auto& t : c.terms) {
        if (t.word.size() < 2) continue;
        auto n = detail::degree_prefixes(t.word);
        for (std::size_t k = 0; k + 1 < t.word.size(); ++k) {
            // the dt-commutation sign in the product needs only the parity of v'
            TForm merged = mult(t.word[k], t.word[k + 1], t.word[k].parity());
            if (merged.is_zero()) continue;
            BarTerm nt;
            nt.coeff = t.coeff * (-detail::parity(n[k + 1]));
            nt.word.reserve(t.word.size() - 1);
            for (std::size_t j = 0; j < t.word.size(); ++j) {
                if (j == k + 1) continue;
                nt.word.push_back(j == k ? merged : t.word[j]);
            }
            out.terms.push_back(std::move(nt));
        }
    }
    return out;
}

inline BarChain bar_total(const BarChain& c) {
    BarChain out = bar_d(c);
    out += bar_bprime(c);
    return out;
}

/// Graded cyclic projection: average over the Koszul cyclic operator on the
/// shifted grading, t(v_1,..,v_N) = (-1)^{(|v_N|-1) sum_{i<N}(|v_i|-1)} (v_N, v_1, ..).
inline BarChain cyclic_project(const BarChain& c) {
    BarChain out;
    out.cyclic = true;
    for (const auto& t : c.terms) {
        const std::size_t N = t.word.size();
        if (N <= 1) {
            out.terms.push_back(t);
            continue;
        }
        std::vector<TForm> word = t.word;
        double sign = 1.0;
        for (std::size_t r = 0; r < N; ++r) {
            BarTerm nt;
            nt.coeff = t.coeff * sign / static_cast<double>(N);
            nt.word = word;
            out.terms.push_back(std::move(nt));
            // rotate once more
            int shifted_last = detail::slot_degree(word.back()) - 1;
            int shifted_rest = 0;
            for (std::size_t j = 0; j + 1 < N; ++j) shifted_rest += detail::slot_degree(word[j]) - 1;
            sign *= detail::parity(shifted_last * shifted_rest);
            std::rotate(word.rbegin(), word.rbegin() + 1, word.rend());
        }
    }
    return out;
}

/// Codifferential pairing: (delta L)[c] = -L[(d + b')c].
template <typename Cochain>
Complex apply_codifferential(Cochain&& functional, const BarChain& c) {
    return -functional(bar_total(c));
}

// --- tensor-monomial normal form -----------------------------------------

// A basis word is the list over slots of (part, idx, mode) monomials, where
// part is 0 for the v' component and 1 for the dt^v'' component. Affine
// terms are keyed with axis in place of mode. Expansion is multilinear, so
// algebraic identities cancel exactly here.
using BasisWord = std::string;

inline std::map<BasisWord, Complex> expand_basis(const BarChain& c) {
    std::map<BasisWord, Complex> out;
    for (const auto& t : c.terms) {
        std::vector<std::pair<std::string, Complex>> partial{{std::string{}, t.coeff}};
        for (const auto& slot : t.word) {
            std::vector<std::pair<std::string, Complex>> next;
            std::vector<std::pair<std::string, Complex>> monos;
            auto emit = [&monos](int part, const std::vector<int>& idx, const std::string& tail, Complex c) {
                std::string key = "|" + std::to_string(part) + ":";
                for (int i : idx) key += std::to_string(i) + ",";
                key += tail;
                monos.emplace_back(std::move(key), c);
            };
            auto emit_part = [&](const ScalarForm& f, int part) {
                for (const auto& [k, coeff] : f.terms()) {
                    std::string tail = "m";
                    for (int m : k.mode) tail += std::to_string(m) + ",";
                    emit(part, k.idx, tail, coeff);
                }
                for (const auto& [k, coeff] : f.linear_terms())
                    emit(part, k.idx, "x" + std::to_string(k.axis), coeff);
            };
            emit_part(slot.prime, 0);
            emit_part(slot.dprime, 1);
            for (const auto& [key, coeff] : partial)
                for (const auto& [mkey, mcoeff] : monos) next.emplace_back(key + mkey, coeff * mcoeff);
            partial = std::move(next);
        }
        for (const auto& [key, coeff] : partial) out[key] += coeff;
    }
    return out;
}

/// Largest basis coefficient magnitude; zero chains reduce to ~1e-16 here.
inline double chain_abs_max(const BarChain& c) {
    double m = 0.0;
    for (const auto& [key, coeff] : expand_basis(c)) m = std::max(m, std::abs(coeff));
    return m;
}

/// Scale reference for relative residuals.
inline double chain_scale(const BarChain& c) {
    double m = 0.0;
    for (const auto& t : c.terms) {
        double w = std::abs(t.coeff);
        for (const auto& slot : t.word)
            w *= slot.prime.sup_norm_bound() + slot.dprime.sup_norm_bound();
        m = std::max(m, w);
    }
    return m;
}

// --- chain sequences and growth -------------------------------------------

struct ChainSequence {
    std::vector<BarChain> components;  // index = word length N
};

struct GrowthReport {
    std::vector<double> norms;           // per N
    std::vector<double> eta;             // norms[N]^(1/N), N >= 1
    std::vector<double> pairing_bounds;  // norms[N] / N!
    bool divergent = false;
    std::string note;
};

/// Submultiplicative diagnostic norm: sum over terms of |coeff| times the
/// product of slot sup-norm bounds.
inline double chain_growth_norm(const BarChain& c) {
    double s = 0.0;
    for (const auto& t : c.terms) {
        double w = std::abs(t.coeff);
        for (const auto& slot : t.word)
            w *= slot.prime.sup_norm_bound() + slot.dprime.sup_norm_bound();
        s += w;
    }
    return s;
}

inline GrowthReport growth_diagnostic(const ChainSequence& s) {
    GrowthReport rep;
    double factorial = 1.0;
    for (std::size_t N = 0; N < s.components.size(); ++N) {
        if (N > 0) factorial *= static_cast<double>(N);
        double norm = chain_growth_norm(s.components[N]);
        rep.norms.push_back(norm);
        rep.pairing_bounds.push_back(norm / factorial);
        if (N >= 1) rep.eta.push_back(norm > 0 ? std::pow(norm, 1.0 / static_cast<double>(N)) : 0.0);
    }
    // Super-exponential growth shows as steadily increasing norms^(1/N).
    std::vector<double> eta;
    for (double e : rep.eta)
        if (e > 0) eta.push_back(e);
    if (eta.size() >= 3) {
        std::size_t m = eta.size();
        bool increasing = eta[m - 1] > eta[m - 2] && eta[m - 2] > eta[m - 3];
        if (increasing && eta[m - 1] / eta[m - 2] >= 1.05 && eta[m - 2] / eta[m - 3] >= 1.05)
            rep.divergent = true;
    }
    rep.note = rep.divergent ? "super-exponential coefficient growth" : "coefficient growth within entire pattern";
    return rep;
}

}  // namespace loopint
