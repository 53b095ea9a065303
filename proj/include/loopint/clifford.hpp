#pragma once

// Complex Clifford algebra representations in even dimension.
//
// Conventions: gamma[i] are skew-adjoint with
//     gamma[i] gamma[j] + gamma[j] gamma[i] = -2 delta_ij Id,
// so Clifford multiplication squares 1-forms to -|v|^2 and a Dirac operator
// assembled from them is self-adjoint. The grading is Gamma = sigma_z^{(m)}
// and the supertrace is str(M) = str_normalizer * tr(Gamma M), with the
// normalizer a calibration constant (see the index pipeline).

#include <map>
#include <stdexcept>
#include <vector>

#include "linalg.hpp"

namespace loopint {

/// Constant-coefficient exterior form on R^n, keyed by increasing multi-indices.
struct ConstForm {
    int dim = 0;
    std::map<std::vector<int>, Complex> coeff;  // keys sorted ascending, 0-based

    static ConstForm covector(int dim, const std::vector<double>& v) {
        ConstForm f;
        f.dim = dim;
        for (int i = 0; i < dim; ++i)
            if (v[i] != 0.0) f.coeff[{i}] = v[i];
        return f;
    }

    static ConstForm basis(int dim, std::vector<int> idx, Complex c = 1.0) {
        ConstForm f;
        f.dim = dim;
        f.coeff[std::move(idx)] = c;
        return f;
    }

    int degree() const {
        return coeff.empty() ? 0 : static_cast<int>(coeff.begin()->first.size());
    }
};

/// Wedge product of constant forms (used heavily by tests).
inline ConstForm wedge(const ConstForm& a, const ConstForm& b) {
    ConstForm out;
    out.dim = a.dim;
    for (const auto& [ia, ca] : a.coeff) {
        for (const auto& [ib, cb] : b.coeff) {
            std::vector<int> merged = ia;
            merged.insert(merged.end(), ib.begin(), ib.end());
            // sort with sign, drop repeats
            int sign = 1;
            bool zero = false;
            for (std::size_t i = 1; i < merged.size() && !zero; ++i) {
                for (std::size_t j = i; j > 0 && merged[j - 1] >= merged[j]; --j) {
                    if (merged[j - 1] == merged[j]) {
                        zero = true;
                        break;
                    }
                    std::swap(merged[j - 1], merged[j]);
                    sign = -sign;
                }
            }
            if (zero) continue;
            out.coeff[merged] += static_cast<double>(sign) * ca * cb;
        }
    }
    return out;
}

struct SpinorRep {
    int n = 0;                    // spatial dimension, even
    std::vector<CMatrix> gamma;   // n matrices of size 2^(n/2)
    CMatrix grading;              // involution anticommuting with every gamma
    Complex str_normalizer{1.0, 0.0};

    int fiber_dim() const { return 1 << (n / 2); }
};

/// Standard Pauli tensor-product construction: hermitian generators times i.
inline SpinorRep build_spinor_rep(int n) {
    if (n < 2 || n > 8 || n % 2 != 0)
        throw std::invalid_argument("build_spinor_rep: unsupported dimension (need even n in [2,8])");
    const int m = n / 2;
    CMatrix sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sy << 0, Complex(0, -1), Complex(0, 1), 0;
    sz << 1, 0, 0, -1;

    auto kron = [](const CMatrix& a, const CMatrix& b) {
        CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
        for (int i = 0; i < a.rows(); ++i)
            for (int j = 0; j < a.cols(); ++j)
                out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        return out;
    };

    auto site_product = [&](int k, const CMatrix& op) {
        // sz on slots < k, op at slot k, identity beyond
        CMatrix acc = CMatrix::Identity(1, 1);
        for (int s = 0; s < m; ++s) {
            if (s < k)
                acc = kron(acc, sz);
            else if (s == k)
                acc = kron(acc, op);
            else
                acc = kron(acc, CMatrix::Identity(2, 2));
        }
        return acc;
    };

    SpinorRep rep;
    rep.n = n;
    rep.gamma.reserve(n);
    for (int k = 0; k < m; ++k) {
        rep.gamma.push_back(kI * site_product(k, sx));
        rep.gamma.push_back(kI * site_product(k, sy));
    }
    rep.grading = CMatrix::Identity(1, 1);
    for (int s = 0; s < m; ++s) rep.grading = kron(rep.grading, sz);
    return rep;
}

/// Clifford multiplication by a constant-coefficient form, degree >= 2 via the
/// antisymmetrized-product quantization (products over increasing indices).
inline CMatrix clifford_mult(const SpinorRep& rep, const ConstForm& form) {
    const int d = rep.fiber_dim();
    CMatrix out = CMatrix::Zero(d, d);
    for (const auto& [idx, c] : form.coeff) {
        if (static_cast<int>(idx.size()) > rep.n)
            throw std::invalid_argument("clifford_mult: form degree exceeds dimension");
        CMatrix word = CMatrix::Identity(d, d);
        for (int i : idx) {
            if (i < 0 || i >= rep.n) throw std::invalid_argument("clifford_mult: index out of range");
            word = word * rep.gamma[i];
        }
        out += c * word;
    }
    return out;
}

inline Complex supertrace(const SpinorRep& rep, const CMatrix& m) {
    if (m.rows() != rep.fiber_dim() || m.cols() != rep.fiber_dim())
        throw std::invalid_argument("supertrace: dimension mismatch");
    return rep.str_normalizer * (rep.grading * m).trace();
}

}  // namespace loopint
