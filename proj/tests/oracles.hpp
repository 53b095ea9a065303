#pragma once

// Independent brute-force oracles used to freeze expected values. These stay
// deliberately naive (bitmask exterior algebra, cofactor recursion) so they
// share no code path with the implementations under test.

#include <cstdint>
#include <vector>

#include "loopint/linalg.hpp"

namespace oracles {

using loopint::Complex;
using loopint::RMatrix;
using loopint::RVector;

/// Multivector over R^dim as coefficients on bitmask basis elements.
struct Multivector {
    int dim = 0;
    std::vector<double> coeff;  // size 2^dim

    explicit Multivector(int d) : dim(d), coeff(std::size_t(1) << d, 0.0) {}

    static Multivector scalar(int d, double v) {
        Multivector m(d);
        m.coeff[0] = v;
        return m;
    }
};

inline int wedge_sign(std::uint32_t a, std::uint32_t b) {
    // (-1)^{# inversions} when concatenating basis factors of a before b
    int sign = 1;
    for (int i = 0; i < 32; ++i) {
        if (!(b >> i & 1u)) continue;
        std::uint32_t higher = a >> (i + 1);
        int crossings = 0;
        while (higher) {
            crossings += higher & 1u;
            higher >>= 1;
        }
        if (crossings % 2) sign = -sign;
    }
    return sign;
}

inline Multivector wedge(const Multivector& a, const Multivector& b) {
    Multivector out(a.dim);
    const std::size_t n = a.coeff.size();
    for (std::uint32_t ma = 0; ma < n; ++ma) {
        if (a.coeff[ma] == 0.0) continue;
        for (std::uint32_t mb = 0; mb < n; ++mb) {
            if (b.coeff[mb] == 0.0 || (ma & mb)) continue;
            out.coeff[ma | mb] += wedge_sign(ma, mb) * a.coeff[ma] * b.coeff[mb];
        }
    }
    return out;
}

inline Multivector from_two_form(const RMatrix& A) {
    // omega = sum_{i<j} A_ij e^i ^ e^j
    Multivector m(static_cast<int>(A.rows()));
    for (int i = 0; i < A.rows(); ++i)
        for (int j = i + 1; j < A.cols(); ++j)
            m.coeff[(1u << i) | (1u << j)] = A(i, j);
    return m;
}

inline Multivector from_covector(const RVector& v) {
    Multivector m(static_cast<int>(v.size()));
    for (int i = 0; i < v.size(); ++i) m.coeff[1u << i] = v(i);
    return m;
}

inline Multivector exp_wedge(const Multivector& w) {
    Multivector acc = Multivector::scalar(w.dim, 1.0);
    Multivector power = Multivector::scalar(w.dim, 1.0);
    double factorial = 1.0;
    for (int k = 1; 2 * k <= w.dim; ++k) {
        power = wedge(power, w);
        factorial *= k;
        for (std::size_t m = 0; m < acc.coeff.size(); ++m) acc.coeff[m] += power.coeff[m] / factorial;
    }
    return acc;
}

/// Top coefficient of e^omega ^ t_1 ^ ... ^ t_N by direct expansion.
inline double berezin_top_bruteforce(const RMatrix& A, const std::vector<RVector>& covectors) {
    Multivector acc = exp_wedge(from_two_form(A));
    for (const auto& v : covectors) acc = wedge(acc, from_covector(v));
    return acc.coeff[(std::size_t(1) << A.rows()) - 1];
}

/// Pfaffian by cofactor recursion along the first row.
inline double pfaffian_recursive(const RMatrix& A) {
    const long n = A.rows();
    if (n % 2 != 0) return 0.0;
    if (n == 0) return 1.0;
    if (n == 2) return A(0, 1);
    double result = 0.0;
    for (long j = 1; j < n; ++j) {
        if (A(0, j) == 0.0) continue;
        RMatrix sub(n - 2, n - 2);
        long r = 0;
        for (long i = 0; i < n; ++i) {
            if (i == 0 || i == j) continue;
            long c = 0;
            for (long k = 0; k < n; ++k) {
                if (k == 0 || k == j) continue;
                sub(r, c++) = A(i, k);
            }
            ++r;
        }
        double sign = (j % 2 == 1) ? 1.0 : -1.0;
        result += sign * A(0, j) * pfaffian_recursive(sub);
    }
    return result;
}

}  // namespace oracles
