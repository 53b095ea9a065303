#pragma once

// Differential forms on the flat torus R^n/Z^n with Fourier-truncated
// coefficients. A ScalarForm stores, per increasing multi-index I and integer
// mode k with |k|_inf <= lambda, a complex coefficient of
//     c_{I,k} e^{2 pi i k.x} dx^I.
// Coefficient functions may carry an additional affine part sum_j L_{I,j} x_j
// (used for constant-curvature gauge potentials, which are not periodic);
// products of two affine-carrying forms are rejected.
//
// TForm is an element  v = v' + dt ^ v''  of the T-invariant algebra on
// X x T with differential d_T v = (dv' - v'', -dv'').
//
// Serialization (test fixtures): one term per line,
//     I=<i1,i2,..|-> k=<k1,..> <re> <im>        Fourier term
//     L I=<..> j=<axis> <re> <im>               affine term
// with 0-based axes; "I=-" denotes the empty multi-index.

#include <cmath>
#include <compare>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace loopint {

struct FlatTorus {
    int n = 2;  // unit lattice, identity metric, volume 1, scal = 0
};

namespace detail {

/// Sorts a concatenated multi-index; returns 0 on repeated entries, else the
/// permutation sign, with `idx` sorted in place.
inline int sort_index_sign(std::vector<int>& idx) {
    int sign = 1;
    for (std::size_t i = 1; i < idx.size(); ++i) {
        for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
            if (idx[j - 1] == idx[j]) return 0;
            std::swap(idx[j - 1], idx[j]);
            sign = -sign;
        }
    }
    return sign;
}

}  // namespace detail

struct FormKey {
    std::vector<int> idx;   // increasing multi-index, 0-based
    std::vector<int> mode;  // length n
    auto operator<=>(const FormKey&) const = default;
};

struct LinearKey {
    std::vector<int> idx;
    int axis = 0;
    auto operator<=>(const LinearKey&) const = default;
};

class ScalarForm {
public:
    ScalarForm() = default;
    ScalarForm(int n, int lambda) : n_(n), lambda_(lambda) {}

    int dim() const { return n_; }
    int cutoff() const { return lambda_; }

    static ScalarForm zero(int n, int lambda) { return ScalarForm(n, lambda); }

    static ScalarForm constant(int n, int lambda, Complex c) {
        ScalarForm f(n, lambda);
        if (c != Complex{}) f.coeff_[{{}, std::vector<int>(n, 0)}] = c;
        return f;
    }

    /// c e^{2 pi i k.x} dx^I
    static ScalarForm monomial(int n, int lambda, std::vector<int> idx, std::vector<int> mode, Complex c) {
        ScalarForm f(n, lambda);
        f.add_term(std::move(idx), std::move(mode), c);
        return f;
    }

    void add_term(std::vector<int> idx, std::vector<int> mode, Complex c) {
        if (static_cast<int>(mode.size()) != n_) throw std::invalid_argument("ScalarForm: bad mode length");
        for (int k : mode)
            if (std::abs(k) > lambda_) return;  // outside the truncation window
        int sign = detail::sort_index_sign(idx);
        if (sign == 0 || c == Complex{}) return;
        for (int i : idx)
            if (i < 0 || i >= n_) throw std::invalid_argument("ScalarForm: index out of range");
        coeff_[{std::move(idx), std::move(mode)}] += static_cast<double>(sign) * c;
    }

    void add_linear_term(std::vector<int> idx, int axis, Complex c) {
        int sign = detail::sort_index_sign(idx);
        if (sign == 0 || c == Complex{}) return;
        linear_[{std::move(idx), axis}] += static_cast<double>(sign) * c;
    }

    const std::map<FormKey, Complex>& terms() const { return coeff_; }
    const std::map<LinearKey, Complex>& linear_terms() const { return linear_; }
    bool has_linear() const { return !linear_.empty(); }

    bool is_zero(double tol = 0.0) const {
        for (const auto& [k, c] : coeff_)
            if (std::abs(c) > tol) return false;
        for (const auto& [k, c] : linear_)
            if (std::abs(c) > tol) return false;
        return true;
    }

    /// True when every stored term has the same index length.
    bool homogeneous() const {
        int deg = -1;
        for (const auto& [k, c] : coeff_) {
            if (deg < 0) deg = static_cast<int>(k.idx.size());
            if (static_cast<int>(k.idx.size()) != deg) return false;
        }
        for (const auto& [k, c] : linear_) {
            if (deg < 0) deg = static_cast<int>(k.idx.size());
            if (static_cast<int>(k.idx.size()) != deg) return false;
        }
        return true;
    }

    /// Degree of a homogeneous form (0 for the zero form).
    int degree() const {
        if (!coeff_.empty()) return static_cast<int>(coeff_.begin()->first.idx.size());
        if (!linear_.empty()) return static_cast<int>(linear_.begin()->first.idx.size());
        return 0;
    }

    /// Conjugation symmetry c_{I,-k} = conj(c_{I,k}); affine parts must be real.
    bool is_real(double tol = 1e-12) const {
        for (const auto& [k, c] : coeff_) {
            std::vector<int> neg(k.mode.size());
            for (std::size_t j = 0; j < k.mode.size(); ++j) neg[j] = -k.mode[j];
            auto it = coeff_.find({k.idx, neg});
            Complex mirror = (it == coeff_.end()) ? Complex{} : it->second;
            if (std::abs(mirror - std::conj(c)) > tol) return false;
        }
        for (const auto& [k, c] : linear_)
            if (std::abs(c.imag()) > tol) return false;
        return true;
    }

    ScalarForm& operator+=(const ScalarForm& o) {
        check_base(o);
        for (const auto& [k, c] : o.coeff_) coeff_[k] += c;
        for (const auto& [k, c] : o.linear_) linear_[k] += c;
        return *this;
    }
    ScalarForm& operator-=(const ScalarForm& o) { return *this += (o * Complex(-1.0)); }

    ScalarForm operator+(const ScalarForm& o) const {
        ScalarForm out = *this;
        out += o;
        return out;
    }
    ScalarForm operator-(const ScalarForm& o) const {
        ScalarForm out = *this;
        out -= o;
        return out;
    }
    ScalarForm operator*(Complex s) const {
        ScalarForm out(n_, lambda_);
        for (const auto& [k, c] : coeff_) out.coeff_[k] = c * s;
        for (const auto& [k, c] : linear_) out.linear_[k] = c * s;
        return out;
    }

    void prune(double tol = 0.0) {
        for (auto it = coeff_.begin(); it != coeff_.end();)
            it = (std::abs(it->second) <= tol) ? coeff_.erase(it) : std::next(it);
        for (auto it = linear_.begin(); it != linear_.end();)
            it = (std::abs(it->second) <= tol) ? linear_.erase(it) : std::next(it);
    }

    /// Coefficient functions evaluated at a (lifted) point, per multi-index.
    std::map<std::vector<int>, Complex> evaluate(const std::vector<double>& x) const {
        std::map<std::vector<int>, Complex> out;
        for (const auto& [k, c] : coeff_) {
            double phase = 0.0;
            for (int j = 0; j < n_; ++j) phase += k.mode[j] * x[j];
            out[k.idx] += c * std::exp(Complex(0.0, 2.0 * kPi * phase));
        }
        for (const auto& [k, c] : linear_) out[k.idx] += c * x[k.axis];
        return out;
    }

    /// Evaluate the degree-p form on p vectors at a point (0 vectors: function value).
    Complex eval_on(const std::vector<double>& x, const std::vector<std::vector<double>>& vectors) const {
        auto pointwise = evaluate(x);
        Complex total{};
        const int p = static_cast<int>(vectors.size());
        for (const auto& [idx, c] : pointwise) {
            if (static_cast<int>(idx.size()) != p) continue;
            if (p == 0) {
                total += c;
                continue;
            }
            RMatrix m(p, p);
            for (int r = 0; r < p; ++r)
                for (int s = 0; s < p; ++s) m(r, s) = vectors[r][idx[s]];
            total += c * m.determinant();
        }
        return total;
    }

    void check_base(const ScalarForm& o) const {
        if (n_ != o.n_ || lambda_ != o.lambda_)
            throw std::invalid_argument("ScalarForm: base/cutoff mismatch");
    }

    double sup_norm_bound() const {
        // sum of coefficient magnitudes; affine parts evaluated at |x|<=1
        double s = 0.0;
        for (const auto& [k, c] : coeff_) s += std::abs(c);
        for (const auto& [k, c] : linear_) s += std::abs(c);
        return s;
    }

private:
    int n_ = 2;
    int lambda_ = 4;
    std::map<FormKey, Complex> coeff_;
    std::map<LinearKey, Complex> linear_;
};

inline ScalarForm operator*(Complex s, const ScalarForm& f) { return f * s; }

/// Exterior product, mode-convolved and truncated back to the cutoff.
inline ScalarForm wedge(const ScalarForm& a, const ScalarForm& b) {
    a.check_base(b);
    if (a.has_linear() && b.has_linear())
        throw std::invalid_argument("wedge: product of two affine-carrying forms is unsupported");
    ScalarForm out(a.dim(), a.cutoff());
    for (const auto& [ka, ca] : a.terms()) {
        for (const auto& [kb, cb] : b.terms()) {
            std::vector<int> idx = ka.idx;
            idx.insert(idx.end(), kb.idx.begin(), kb.idx.end());
            std::vector<int> mode(a.dim());
            for (int j = 0; j < a.dim(); ++j) mode[j] = ka.mode[j] + kb.mode[j];
            out.add_term(std::move(idx), std::move(mode), ca * cb);
        }
    }
    auto linear_cross = [&out](const ScalarForm& lin, const ScalarForm& fourier, bool lin_first) {
        for (const auto& [kl, cl] : lin.linear_terms()) {
            for (const auto& [kf, cf] : fourier.terms()) {
                bool mode_zero = true;
                for (int m : kf.mode) mode_zero &= (m == 0);
                if (!mode_zero)
                    throw std::invalid_argument("wedge: affine x oscillating product is unsupported");
                std::vector<int> idx;
                if (lin_first) {
                    idx = kl.idx;
                    idx.insert(idx.end(), kf.idx.begin(), kf.idx.end());
                } else {
                    idx = kf.idx;
                    idx.insert(idx.end(), kl.idx.begin(), kl.idx.end());
                }
                out.add_linear_term(std::move(idx), kl.axis, cl * cf);
            }
        }
    };
    if (a.has_linear()) linear_cross(a, b, true);
    if (b.has_linear()) linear_cross(b, a, false);
    return out;
}

/// de Rham differential; on mode k the factor 2 pi i k_j accompanies dx^j.
inline ScalarForm exterior_d(const ScalarForm& a) {
    ScalarForm out(a.dim(), a.cutoff());
    for (const auto& [k, c] : a.terms()) {
        for (int j = 0; j < a.dim(); ++j) {
            if (k.mode[j] == 0) continue;
            std::vector<int> idx;
            idx.push_back(j);
            idx.insert(idx.end(), k.idx.begin(), k.idx.end());
            out.add_term(std::move(idx), k.mode, Complex(0.0, 2.0 * kPi * k.mode[j]) * c);
        }
    }
    for (const auto& [k, c] : a.linear_terms()) {
        std::vector<int> idx;
        idx.push_back(k.axis);
        idx.insert(idx.end(), k.idx.begin(), k.idx.end());
        out.add_term(std::move(idx), std::vector<int>(a.dim(), 0), c);
    }
    return out;
}

/// Top-degree integral over the unit-volume torus: the zero-mode coefficient
/// of dx^0 ^ ... ^ dx^{n-1}.
inline Complex integrate_top(const ScalarForm& a) {
    std::vector<int> top(a.dim());
    for (int j = 0; j < a.dim(); ++j) top[j] = j;
    auto it = a.terms().find({top, std::vector<int>(a.dim(), 0)});
    return it == a.terms().end() ? Complex{} : it->second;
}

// --- the equivariant algebra Omega_T(X) ---------------------------------

struct TForm {
    ScalarForm prime;   // v'
    ScalarForm dprime;  // v''

    TForm() = default;
    TForm(ScalarForm p, ScalarForm dp) : prime(std::move(p)), dprime(std::move(dp)) {}

    static TForm from_prime(ScalarForm p) {
        ScalarForm z = ScalarForm::zero(p.dim(), p.cutoff());
        return TForm(std::move(p), std::move(z));
    }
    static TForm from_dprime(ScalarForm dp) {
        ScalarForm z = ScalarForm::zero(dp.dim(), dp.cutoff());
        return TForm(std::move(z), std::move(dp));
    }

    /// Homogeneous total degree: deg v' when present, else deg v'' + 1.
    int degree() const {
        if (!prime.is_zero()) return prime.degree();
        if (!dprime.is_zero()) return dprime.degree() + 1;
        return 0;
    }

    bool homogeneous() const {
        if (!prime.homogeneous() || !dprime.homogeneous()) return false;
        if (prime.is_zero() || dprime.is_zero()) return true;
        return dprime.degree() == prime.degree() - 1;
    }

    /// Total-degree parity (0/1). d_T mixes degrees p+1 and p-1, so parity is
    /// the grading the bar-complex signs can rely on; throws on mixed parity.
    int parity() const {
        int par = -1;
        auto feed = [&par](const ScalarForm& f, int shift) {
            for (const auto& [key, c] : f.terms()) {
                int p = (static_cast<int>(key.idx.size()) + shift) % 2;
                if (par < 0) par = p;
                if (par != p) throw std::invalid_argument("TForm: mixed-parity slot");
            }
            for (const auto& [key, c] : f.linear_terms()) {
                int p = (static_cast<int>(key.idx.size()) + shift) % 2;
                if (par < 0) par = p;
                if (par != p) throw std::invalid_argument("TForm: mixed-parity slot");
            }
        };
        feed(prime, 0);
        feed(dprime, 1);
        return par < 0 ? 0 : par;
    }

    /// Decomposition into honestly homogeneous pieces: prime terms of degree d
    /// paired with dprime terms of degree d-1.
    std::vector<TForm> split_homogeneous() const {
        std::map<int, TForm> parts;
        auto part = [&](int deg) -> TForm& {
            auto it = parts.find(deg);
            if (it == parts.end()) {
                TForm blank(ScalarForm::zero(prime.dim(), prime.cutoff()),
                            ScalarForm::zero(prime.dim(), prime.cutoff()));
                it = parts.emplace(deg, std::move(blank)).first;
            }
            return it->second;
        };
        for (const auto& [key, c] : prime.terms())
            part(static_cast<int>(key.idx.size())).prime.add_term(key.idx, key.mode, c);
        for (const auto& [key, c] : prime.linear_terms())
            part(static_cast<int>(key.idx.size())).prime.add_linear_term(key.idx, key.axis, c);
        for (const auto& [key, c] : dprime.terms())
            part(static_cast<int>(key.idx.size()) + 1).dprime.add_term(key.idx, key.mode, c);
        for (const auto& [key, c] : dprime.linear_terms())
            part(static_cast<int>(key.idx.size()) + 1).dprime.add_linear_term(key.idx, key.axis, c);
        std::vector<TForm> out;
        for (auto& [deg, tf] : parts) out.push_back(std::move(tf));
        return out;
    }

    bool is_zero(double tol = 0.0) const { return prime.is_zero(tol) && dprime.is_zero(tol); }

    TForm operator*(Complex s) const { return TForm(prime * s, dprime * s); }
    TForm operator+(const TForm& o) const { return TForm(prime + o.prime, dprime + o.dprime); }
};

/// d_T v = (dv' - v'', -dv'')
inline TForm d_T(const TForm& v) {
    return TForm(exterior_d(v.prime) - v.dprime, exterior_d(v.dprime) * Complex(-1.0));
}

/// Product in Omega_T: (a' + dt a'')(b' + dt b'')
///   = a'b' + dt (a''^b' + (-1)^{|a'|} a'^b'').
inline TForm mult(const TForm& a, const TForm& b, int deg_a_prime) {
    ScalarForm p = wedge(a.prime, b.prime);
    double sgn = (deg_a_prime % 2 == 0) ? 1.0 : -1.0;
    ScalarForm dp = wedge(a.dprime, b.prime) + sgn * wedge(a.prime, b.dprime);
    return TForm(std::move(p), std::move(dp));
}

// --- matrix-valued forms (matrices of ScalarForm) ------------------------

using FormMatrix = std::vector<std::vector<ScalarForm>>;

inline FormMatrix form_matrix_zero(int r, int c, int n, int lambda) {
    return FormMatrix(r, std::vector<ScalarForm>(c, ScalarForm::zero(n, lambda)));
}

inline FormMatrix form_matrix_mult(const FormMatrix& a, const FormMatrix& b) {
    const std::size_t r = a.size(), k = b.size(), c = b.front().size();
    if (a.front().size() != k) throw std::invalid_argument("form_matrix_mult: shape mismatch");
    FormMatrix out = form_matrix_zero(static_cast<int>(r), static_cast<int>(c),
                                      a.front().front().dim(), a.front().front().cutoff());
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            for (std::size_t l = 0; l < k; ++l) out[i][j] += wedge(a[i][l], b[l][j]);
    return out;
}

inline ScalarForm form_matrix_trace(const FormMatrix& m) {
    ScalarForm out = ScalarForm::zero(m.front().front().dim(), m.front().front().cutoff());
    for (std::size_t i = 0; i < m.size(); ++i) out += m[i][i];
    return out;
}

// Normalization constant for Chern-Weil representatives. Fixed together with
// the supertrace normalizer and the (2 pi)^{-n/2} localization prefactor by
// the flux-k index calibration; the value is emitted in pipeline reports.
inline constexpr Complex kChernKappa{0.0, 1.0};

/// tr exp(kappa R), truncated to form degree <= n.
inline ScalarForm chern_weil_ch(const FormMatrix& curvature, int rank) {
    if (curvature.size() != static_cast<std::size_t>(rank))
        throw std::invalid_argument("chern_weil_ch: rank mismatch");
    for (const auto& row : curvature)
        if (row.size() != static_cast<std::size_t>(rank))
            throw std::invalid_argument("chern_weil_ch: non-square matrix field");
    const int n = curvature.front().front().dim();
    const int lambda = curvature.front().front().cutoff();
    ScalarForm out = ScalarForm::constant(n, lambda, static_cast<double>(rank));
    FormMatrix scaled = form_matrix_zero(rank, rank, n, lambda);
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j) scaled[i][j] = curvature[i][j] * kChernKappa;
    FormMatrix power = scaled;
    double factorial = 1.0;
    for (int k = 1; 2 * k <= n; ++k) {
        factorial *= k;
        out += form_matrix_trace(power) * Complex(1.0 / factorial);
        if (2 * (k + 1) <= n) power = form_matrix_mult(power, scaled);
    }
    return out;
}

/// Chern-Weil representative of the A-hat genus,
/// det^{1/2}( (kappa R/2) / sinh(kappa R/2) ), expanded to degree <= n.
inline ScalarForm a_hat(const FormMatrix& riemann) {
    const int d = static_cast<int>(riemann.size());
    const int n = riemann.front().front().dim();
    const int lambda = riemann.front().front().cutoff();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            ScalarForm defect = riemann[i][j] + riemann[j][i];
            if (!defect.is_zero(1e-12)) throw std::invalid_argument("a_hat: input is not skew");
        }
    // X = kappa R / 2; x/sinh(x) = 1 - x^2/6 + 7x^4/360 - 31x^6/15120 + ...
    FormMatrix x = form_matrix_zero(d, d, n, lambda);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) x[i][j] = riemann[i][j] * (kChernKappa * 0.5);
    if (n >= 8) throw std::invalid_argument("a_hat: expansion implemented through degree 7");
    FormMatrix x2 = form_matrix_mult(x, x);
    // Only the degree-4 term of (1/2) tr log(X/sinh X) survives below degree 8.
    ScalarForm logdet_half = form_matrix_trace(x2) * Complex(-1.0 / 12.0);
    ScalarForm out = ScalarForm::constant(n, lambda, 1.0);
    out += logdet_half;
    return out;
}

// --- serialization --------------------------------------------------------

inline void serialize(const ScalarForm& f, std::ostream& os) {
    os.precision(17);
    os << "scalarform n=" << f.dim() << " lambda=" << f.cutoff() << "\n";
    auto write_idx = [&os](const std::vector<int>& idx) {
        os << "I=";
        if (idx.empty()) os << "-";
        for (std::size_t i = 0; i < idx.size(); ++i) os << (i ? "," : "") << idx[i];
    };
    for (const auto& [k, c] : f.terms()) {
        write_idx(k.idx);
        os << " k=";
        for (std::size_t i = 0; i < k.mode.size(); ++i) os << (i ? "," : "") << k.mode[i];
        os << " " << c.real() << " " << c.imag() << "\n";
    }
    for (const auto& [k, c] : f.linear_terms()) {
        os << "L ";
        write_idx(k.idx);
        os << " j=" << k.axis << " " << c.real() << " " << c.imag() << "\n";
    }
    os << "end\n";
}

inline ScalarForm deserialize_scalarform(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("deserialize: empty stream");
    int n = 0, lambda = 0;
    if (std::sscanf(line.c_str(), "scalarform n=%d lambda=%d", &n, &lambda) != 2)
        throw std::runtime_error("deserialize: bad header");
    ScalarForm f(n, lambda);
    auto parse_ints = [](const std::string& s) {
        std::vector<int> out;
        if (s == "-") return out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
        return out;
    };
    while (std::getline(is, line)) {
        if (line == "end") break;
        std::stringstream ss(line);
        std::string first;
        ss >> first;
        if (first == "L") {
            std::string istr, jstr;
            double re, im;
            ss >> istr >> jstr >> re >> im;
            f.add_linear_term(parse_ints(istr.substr(2)), std::stoi(jstr.substr(2)), Complex(re, im));
        } else {
            std::string kstr;
            double re, im;
            ss >> kstr >> re >> im;
            f.add_term(parse_ints(first.substr(2)), parse_ints(kstr.substr(2)), Complex(re, im));
        }
    }
    return f;
}

}  // namespace loopint
