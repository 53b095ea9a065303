#pragma once

// Finite spectral models of twisted Dirac operators on flat tori.
//
// Flat model: Fourier modes |k|_inf <= lambda tensor spinor tensor bundle
// indices; D = sum_j c(e^j)(d_j + A_j). Magnetic model: Landau levels on T^2
// with integer flux; D is assembled from the ladder structure, the kernel
// sits in one chirality with multiplicity |flux| and the nonzero spectrum is
// +-sqrt(4 pi |flux| j).
//
// H = D^2/2 is eigendecomposed eagerly; simplex operator integrals evaluate
//   Str(e^{-tau_1 H} F_1 e^{-(tau_2-tau_1) H} ... F_N e^{-(1-tau_N) H})
// over the ordered simplex by Duffy-mapped Gauss quadrature (quasi-Monte
// Carlo for the longest words).

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clifford.hpp"
#include "forms.hpp"
#include "linalg.hpp"
#include "quadrature.hpp"

namespace loopint {

struct BundleModel {
    enum class Kind { TrivialPotential, MagneticLine };
    Kind kind = Kind::TrivialPotential;
    FlatTorus base;
    // trivial-with-potential
    int rank = 1;
    FormMatrix potential;  // r x r matrix of 1-forms, skew-hermitian-valued
    // magnetic-line
    int flux = 0;
    int levels = 40;

    static BundleModel trivial(int n, int rank = 1, int lambda = 4) {
        BundleModel b;
        b.kind = Kind::TrivialPotential;
        b.base = FlatTorus{n};
        b.rank = rank;
        b.potential = form_matrix_zero(rank, rank, n, lambda);
        return b;
    }

    static BundleModel with_potential(FormMatrix a) {
        BundleModel b;
        b.kind = Kind::TrivialPotential;
        b.rank = static_cast<int>(a.size());
        b.base = FlatTorus{a.front().front().dim()};
        b.potential = std::move(a);
        return b;
    }

    static BundleModel magnetic(int flux, int levels = 40) {
        if (flux == 0) throw std::invalid_argument("BundleModel::magnetic: flux must be nonzero (use trivial)");
        BundleModel b;
        b.kind = Kind::MagneticLine;
        b.base = FlatTorus{2};
        b.flux = flux;
        b.levels = levels;
        return b;
    }

    /// Curvature R = dA + A ^ A (trivial kind) or the constant flux form.
    FormMatrix curvature() const {
        if (kind == Kind::TrivialPotential) {
            FormMatrix r = form_matrix_zero(rank, rank, base.n, potential.front().front().cutoff());
            FormMatrix asq = form_matrix_mult(potential, potential);
            for (int i = 0; i < rank; ++i)
                for (int j = 0; j < rank; ++j) r[i][j] = exterior_d(potential[i][j]) + asq[i][j];
            return r;
        }
        // R = -2 pi i k dx^dy on the unit torus
        FormMatrix r = form_matrix_zero(1, 1, 2, 4);
        r[0][0].add_term({0, 1}, {0, 0}, Complex(0.0, -2.0 * kPi * flux));
        return r;
    }

    /// Fixed gauge for the constant-curvature magnetic bundle on the
    /// fundamental domain: A = -pi i k (x dy - y dx); evaluation on lifted
    /// loop positions realizes the branch-corrected transport.
    ScalarForm magnetic_gauge() const {
        if (kind != Kind::MagneticLine) throw std::invalid_argument("magnetic_gauge: wrong bundle kind");
        ScalarForm a(2, 4);
        a.add_linear_term({1}, 0, Complex(0.0, -kPi * flux));  // -pi i k x dy
        a.add_linear_term({0}, 1, Complex(0.0, kPi * flux));   // +pi i k y dx
        return a;
    }
};

class SpectralModel {
public:
    enum class Kind { FlatFourier, MagneticLandau };

    Kind kind = Kind::FlatFourier;
    int n = 2;
    SpinorRep rep;
    int lambda = 0;  // flat cutoff
    int flux = 0, levels = 0;
    int rank = 1;
    bool truncation_overflow = false;  // potential couples modes beyond the cutoff
    double dropped_heat_weight = 0.0;  // largest dropped e^{-lambda_max^2/2}

    CMatrix D, grading;
    RVector evals;  // eigenvalues of H = D^2/2, ascending
    CMatrix evecs;

    long dim() const { return D.rows(); }
    int modes_per_axis() const { return 2 * lambda + 1; }

    long mode_count() const {
        long m = 1;
        for (int j = 0; j < n; ++j) m *= modes_per_axis();
        return m;
    }

    long mode_flat_index(const std::vector<int>& k) const {
        long idx = 0;
        for (int j = 0; j < n; ++j) idx = idx * modes_per_axis() + (k[j] + lambda);
        return idx;
    }

    bool mode_in_range(const std::vector<int>& k) const {
        for (int j = 0; j < n; ++j)
            if (std::abs(k[j]) > lambda) return false;
        return true;
    }

    long basis_index(long mode_idx, int spinor, int bundle) const {
        return (mode_idx * rep.fiber_dim() + spinor) * rank + bundle;
    }

    void finalize() {
        CMatrix h = 0.5 * D * D;
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
        evals = es.eigenvalues().cwiseMax(0.0);
        evecs = es.eigenvectors();
    }

    CMatrix heat(double t) const {
        if (t < 0.0) throw std::invalid_argument("heat_semigroup: negative time");
        CVector w = (-t * evals.array()).exp().matrix().cast<Complex>();
        return evecs * w.asDiagonal() * evecs.adjoint();
    }

    /// Largest heat eigenvalue dropped by the truncation (reporting only).
    double truncation_weight() const { return dropped_heat_weight; }
};

// --- builders --------------------------------------------------------------

inline SpectralModel build_dirac_flat(const FlatTorus& torus, int lambda, const BundleModel& bundle,
                                      const SpinorRep& rep) {
    if (bundle.kind != BundleModel::Kind::TrivialPotential)
        throw std::invalid_argument("build_dirac_flat: needs a trivial-with-potential bundle");
    if (torus.n != rep.n) throw std::invalid_argument("build_dirac_flat: dimension mismatch");
    SpectralModel m;
    m.kind = SpectralModel::Kind::FlatFourier;
    m.n = torus.n;
    m.rep = rep;
    m.lambda = lambda;
    m.rank = bundle.rank;

    const long modes = m.mode_count();
    const int fd = rep.fiber_dim();
    const long dim = modes * fd * bundle.rank;
    m.D = CMatrix::Zero(dim, dim);
    m.grading = CMatrix::Zero(dim, dim);

    // skew-hermiticity of the connection (unitarity)
    for (int i = 0; i < bundle.rank; ++i)
        for (int j = 0; j < bundle.rank; ++j) {
            const ScalarForm& aij = bundle.potential[i][j];
            for (const auto& [key, c] : aij.terms()) {
                std::vector<int> neg(key.mode.size());
                for (std::size_t q = 0; q < key.mode.size(); ++q) neg[q] = -key.mode[q];
                auto it = bundle.potential[j][i].terms().find({key.idx, neg});
                Complex mirror = it == bundle.potential[j][i].terms().end() ? Complex{} : it->second;
                if (std::abs(mirror + std::conj(c)) > 1e-10)
                    throw std::invalid_argument("build_dirac_flat: potential is not skew-hermitian");
            }
        }

    // enumerate modes
    std::vector<int> k(m.n, -lambda);
    auto advance = [&]() {
        int j = 0;
        while (j < m.n && ++k[j] > lambda) k[j++] = -lambda;
        return j < m.n;
    };
    do {
        const long mi = m.mode_flat_index(k);
        // derivative blocks: sum_j gamma_j (2 pi i k_j)
        CMatrix blk = CMatrix::Zero(fd, fd);
        for (int j = 0; j < m.n; ++j) blk += Complex(0.0, 2.0 * kPi * k[j]) * rep.gamma[j];
        for (int s = 0; s < fd; ++s)
            for (int sp = 0; sp < fd; ++sp)
                for (int b = 0; b < bundle.rank; ++b)
                    m.D(m.basis_index(mi, sp, b), m.basis_index(mi, s, b)) += blk(sp, s);
        for (int s = 0; s < fd; ++s)
            for (int b = 0; b < bundle.rank; ++b) {
                long idx = m.basis_index(mi, s, b);
                m.grading(idx, idx) = rep.grading(s, s);
            }
    } while (advance());

    // potential terms: gamma_axis tensor mode-shift tensor E_{ij}
    for (int bi = 0; bi < bundle.rank; ++bi)
        for (int bj = 0; bj < bundle.rank; ++bj) {
            const ScalarForm& aij = bundle.potential[bi][bj];
            if (aij.has_linear())
                throw std::invalid_argument("build_dirac_flat: affine potentials are not Fourier-representable");
            for (const auto& [key, c] : aij.terms()) {
                if (key.idx.size() != 1)
                    throw std::invalid_argument("build_dirac_flat: potential entries must be 1-forms");
                const int axis = key.idx[0];
                bool shifts = false;
                for (int q : key.mode) shifts |= (q != 0);
                if (shifts) m.truncation_overflow = true;
                std::vector<int> kk(m.n, -lambda);
                auto adv = [&]() {
                    int j = 0;
                    while (j < m.n && ++kk[j] > lambda) kk[j++] = -lambda;
                    return j < m.n;
                };
                do {
                    std::vector<int> target(m.n);
                    for (int j = 0; j < m.n; ++j) target[j] = kk[j] + key.mode[j];
                    if (!m.mode_in_range(target)) continue;
                    const long from = m.mode_flat_index(kk), to = m.mode_flat_index(target);
                    for (int s = 0; s < fd; ++s)
                        for (int sp = 0; sp < fd; ++sp) {
                            Complex g = rep.gamma[axis](sp, s);
                            if (g == Complex{}) continue;
                            m.D(m.basis_index(to, sp, bi), m.basis_index(from, s, bj)) += g * c;
                        }
                } while (adv());
            }
        }

    if (hermiticity_defect(m.D) > 1e-10)
        throw std::runtime_error("build_dirac_flat: assembled D is not self-adjoint");
    const double lam_max = 2.0 * kPi * (lambda + 1);
    m.dropped_heat_weight = std::exp(-0.5 * lam_max * lam_max);
    m.finalize();
    return m;
}

inline SpectralModel build_dirac_magnetic(int flux, int levels, const SpinorRep& rep) {
    if (flux == 0) throw std::invalid_argument("build_dirac_magnetic: flux 0 is the flat model");
    if (levels < 2) throw std::invalid_argument("build_dirac_magnetic: need at least two levels");
    if (rep.n != 2) throw std::invalid_argument("build_dirac_magnetic: base torus is two-dimensional");
    SpectralModel m;
    m.kind = SpectralModel::Kind::MagneticLandau;
    m.n = 2;
    m.rep = rep;
    m.flux = flux;
    m.levels = levels;
    m.rank = 1;

    const int deg = std::abs(flux);
    const int L = levels;
    // basis: (spatial level j = 0..L) x (spinor s = 0(up),1(down)) x (degeneracy)
    const long dim = static_cast<long>(L + 1) * 2 * deg;
    auto idx = [&](int j, int s, int g) { return (static_cast<long>(j) * 2 + s) * deg + g; };

    m.D = CMatrix::Zero(dim, dim);
    m.grading = CMatrix::Zero(dim, dim);
    const double omega = 4.0 * kPi * std::abs(flux);
    for (int j = 0; j <= L; ++j)
        for (int g = 0; g < deg; ++g) {
            m.grading(idx(j, 0, g), idx(j, 0, g)) = 1.0;
            m.grading(idx(j, 1, g), idx(j, 1, g)) = -1.0;
            if (flux > 0) {
                // zero modes spin-up at j=0; D |j,up> = sqrt(omega j) |j-1,down>
                if (j >= 1) {
                    const double w = std::sqrt(omega * j);
                    m.D(idx(j - 1, 1, g), idx(j, 0, g)) = w;
                    m.D(idx(j, 0, g), idx(j - 1, 1, g)) = w;
                }
            } else {
                if (j >= 1) {
                    const double w = std::sqrt(omega * j);
                    m.D(idx(j - 1, 0, g), idx(j, 1, g)) = w;
                    m.D(idx(j, 1, g), idx(j - 1, 0, g)) = w;
                }
            }
        }
    m.dropped_heat_weight = std::exp(-0.5 * omega * (L + 1));
    m.finalize();
    return m;
}

// --- operator constructions -------------------------------------------------

inline CMatrix heat_semigroup(const SpectralModel& m, double t) { return m.heat(t); }

inline Complex str_op(const SpectralModel& m, const CMatrix& op) {
    if (op.rows() != m.dim() || op.cols() != m.dim())
        throw std::invalid_argument("str_op: dimension mismatch");
    return m.rep.str_normalizer * (m.grading * op).trace();
}

/// Pointwise Clifford multiplication by a scalar-coefficient form; Fourier
/// modes act as shifts on the mode index.
inline CMatrix mult_operator(const SpectralModel& m, const ScalarForm& form) {
    const int fd = m.rep.fiber_dim();
    CMatrix out = CMatrix::Zero(m.dim(), m.dim());
    if (form.has_linear())
        throw std::invalid_argument("mult_operator: affine coefficients are unsupported on spectral models");
    if (m.kind == SpectralModel::Kind::MagneticLandau) {
        for (const auto& [key, c] : form.terms()) {
            bool constant = true;
            for (int q : key.mode) constant &= (q == 0);
            if (!constant)
                throw std::invalid_argument("mult_operator: non-constant form on the magnetic model");
            CMatrix word = CMatrix::Identity(fd, fd);
            for (int i : key.idx) word = word * m.rep.gamma[i];
            // fiber matrix acts on the spin slot of (level x spin x degeneracy)
            const int deg = std::abs(m.flux);
            for (int j = 0; j <= m.levels; ++j)
                for (int s = 0; s < fd; ++s)
                    for (int sp = 0; sp < fd; ++sp) {
                        if (word(sp, s) == Complex{}) continue;
                        for (int g = 0; g < deg; ++g) {
                            long col = (static_cast<long>(j) * 2 + s) * deg + g;
                            long row = (static_cast<long>(j) * 2 + sp) * deg + g;
                            out(row, col) += c * word(sp, s);
                        }
                    }
        }
        return out;
    }
    if (form.dim() != m.n) throw std::invalid_argument("mult_operator: base dimension mismatch");
    for (const auto& [key, c] : form.terms()) {
        CMatrix word = CMatrix::Identity(fd, fd);
        for (int i : key.idx) word = word * m.rep.gamma[i];
        std::vector<int> k(m.n, -m.lambda);
        auto advance = [&]() {
            int j = 0;
            while (j < m.n && ++k[j] > m.lambda) k[j++] = -m.lambda;
            return j < m.n;
        };
        do {
            std::vector<int> target(m.n);
            for (int j = 0; j < m.n; ++j) target[j] = k[j] + key.mode[j];
            if (!m.mode_in_range(target)) continue;
            const long from = m.mode_flat_index(k), to = m.mode_flat_index(target);
            for (int s = 0; s < fd; ++s)
                for (int sp = 0; sp < fd; ++sp) {
                    if (word(sp, s) == Complex{}) continue;
                    for (int b = 0; b < m.rank; ++b)
                        out(m.basis_index(to, sp, b), m.basis_index(from, s, b)) += c * word(sp, s);
                }
        } while (advance());
    }
    return out;
}

struct SimplexIntegrator {
    int gauss_order = 8;
    std::size_t qmc_samples = 20000;
    int qmc_threshold = 4;  // words of this length and beyond use quasi-Monte Carlo
};

/// int_{Delta_N} Str(e^{-tau_1 H} F_1 e^{-(tau_2-tau_1)H} ... F_N e^{-(1-tau_N)H}) dtau
inline Complex simplex_operator_integral(const SpectralModel& m, const std::vector<CMatrix>& factors,
                                         const SimplexIntegrator& integ = {}) {
    const int N = static_cast<int>(factors.size());
    if (N > 4) throw std::invalid_argument("simplex_operator_integral: at most four factors");
    const long d = m.dim();
    // eigenbasis transforms
    std::vector<CMatrix> f(N);
    for (int a = 0; a < N; ++a) {
        if (factors[a].rows() != d || factors[a].cols() != d)
            throw std::invalid_argument("simplex_operator_integral: factor dimension mismatch");
        f[a] = m.evecs.adjoint() * factors[a] * m.evecs;
    }
    CMatrix g = m.evecs.adjoint() * m.grading * m.evecs;
    const RVector& lam = m.evals;

    if (N == 0) {
        Complex s{};
        CVector w = (-lam.array()).exp().matrix().cast<Complex>();
        for (long i = 0; i < d; ++i) s += g(i, i) * w(i);
        return m.rep.str_normalizer * s;
    }

    auto value_at = [&](const std::vector<double>& tau) {
        CVector w0 = (-tau[0] * lam.array()).exp().matrix().cast<Complex>();
        CMatrix chain = g * w0.asDiagonal();
        for (int a = 0; a < N; ++a) {
            chain = chain * f[a];
            const double dt = (a + 1 < N ? tau[a + 1] : 1.0) - tau[a];
            CVector w = (-dt * lam.array()).exp().matrix().cast<Complex>();
            chain = chain * w.asDiagonal();
        }
        return Complex(chain.trace());
    };

    Complex total = (N >= integ.qmc_threshold)
                        ? integrate_simplex_qmc(N, integ.qmc_samples, value_at)
                        : integrate_simplex_gauss(N, integ.gauss_order, value_at);
    return m.rep.str_normalizer * total;
}

inline Complex mckean_singer(const SpectralModel& m, double t) {
    if (t <= 0.0) throw std::invalid_argument("mckean_singer: t must be positive");
    CVector w = (-t * m.evals.array()).exp().matrix().cast<Complex>();
    CMatrix g = m.evecs.adjoint() * m.grading * m.evecs;
    Complex s{};
    for (long i = 0; i < m.dim(); ++i) s += g(i, i) * w(i);
    return m.rep.str_normalizer * s;
}

// --- spectral cache ---------------------------------------------------------

// Binary layout (little-endian): magic "LSPC0001", then u32 kind, u32 n,
// u32 lambda, i32 flux, u32 levels, u32 rank, u64 dim, followed by dim f64
// eigenvalues, dim*dim complex eigenvectors (re,im f64 pairs, row-major),
// dim*dim complex D entries, dim f64 grading diagonal.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string model_cache_key(const std::string& descriptor) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(descriptor)));
    return std::string(buf);
}

inline void save_model_cache(const SpectralModel& m, const std::filesystem::path& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("save_model_cache: cannot open " + file.string());
    os.write("LSPC0001", 8);
    auto put_u32 = [&os](std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); };
    auto put_i32 = [&os](std::int32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); };
    put_u32(static_cast<std::uint32_t>(m.kind));
    put_u32(static_cast<std::uint32_t>(m.n));
    put_u32(static_cast<std::uint32_t>(m.lambda));
    put_i32(m.flux);
    put_u32(static_cast<std::uint32_t>(m.levels));
    put_u32(static_cast<std::uint32_t>(m.rank));
    std::uint64_t dim = static_cast<std::uint64_t>(m.dim());
    os.write(reinterpret_cast<const char*>(&dim), 8);
    os.write(reinterpret_cast<const char*>(m.evals.data()), static_cast<std::streamsize>(dim * 8));
    os.write(reinterpret_cast<const char*>(m.evecs.data()), static_cast<std::streamsize>(dim * dim * 16));
    os.write(reinterpret_cast<const char*>(m.D.data()), static_cast<std::streamsize>(dim * dim * 16));
    RVector gd(dim);
    for (std::uint64_t i = 0; i < dim; ++i) gd(static_cast<long>(i)) = m.grading(i, i).real();
    os.write(reinterpret_cast<const char*>(gd.data()), static_cast<std::streamsize>(dim * 8));
}

/// Attempts to restore eigendata into a freshly described model; false means
/// the caller should rebuild (missing or corrupt cache).
inline bool load_model_cache(SpectralModel& m, const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) return false;
    char magic[8];
    if (!is.read(magic, 8) || std::string(magic, 8) != "LSPC0001") return false;
    std::uint32_t kind, n, lambda, levels, rank;
    std::int32_t flux;
    std::uint64_t dim;
    auto get = [&is](auto& v) { return bool(is.read(reinterpret_cast<char*>(&v), sizeof(v))); };
    if (!get(kind) || !get(n) || !get(lambda) || !get(flux) || !get(levels) || !get(rank) || !get(dim))
        return false;
    if (kind != static_cast<std::uint32_t>(m.kind) || n != static_cast<std::uint32_t>(m.n) ||
        lambda != static_cast<std::uint32_t>(m.lambda) || flux != m.flux ||
        levels != static_cast<std::uint32_t>(m.levels) || rank != static_cast<std::uint32_t>(m.rank))
        return false;
    m.evals.resize(static_cast<long>(dim));
    m.evecs.resize(static_cast<long>(dim), static_cast<long>(dim));
    m.D.resize(static_cast<long>(dim), static_cast<long>(dim));
    RVector gd(static_cast<long>(dim));
    if (!is.read(reinterpret_cast<char*>(m.evals.data()), static_cast<std::streamsize>(dim * 8))) return false;
    if (!is.read(reinterpret_cast<char*>(m.evecs.data()), static_cast<std::streamsize>(dim * dim * 16)))
        return false;
    if (!is.read(reinterpret_cast<char*>(m.D.data()), static_cast<std::streamsize>(dim * dim * 16))) return false;
    if (!is.read(reinterpret_cast<char*>(gd.data()), static_cast<std::streamsize>(dim * 8))) return false;
    m.grading = CMatrix::Zero(static_cast<long>(dim), static_cast<long>(dim));
    for (long i = 0; i < static_cast<long>(dim); ++i) m.grading(i, i) = gd(i);
    return true;
}

}  // namespace loopint
