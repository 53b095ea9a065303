#pragma once

// Finite-dimensional Pfaffian/Berezin machinery and the loop-space top-degree
// functional q on smooth loops over the flat torus, where the spin structure
// trivializes spinor transport.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "clifford.hpp"
#include "linalg.hpp"
#include "loops.hpp"
#include "quadrature.hpp"

namespace loopint {

struct DegenerateKernelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SkewForm {
    int dim = 0;
    RMatrix A;  // omega[v,w] = <v, A w>, A^T = -A
};

/// Pfaffian of a real skew-symmetric matrix by Parlett-Reid elimination with
/// partial pivoting; convention pf([[0,a],[-a,0]]) = a.
inline double pfaffian(RMatrix A, double skew_tol = 1e-12) {
    const long n = A.rows();
    if (A.cols() != n) throw std::invalid_argument("pfaffian: matrix not square");
    if (n % 2 != 0) throw std::invalid_argument("pfaffian: odd dimension");
    if (n == 0) return 1.0;
    double scale = A.cwiseAbs().maxCoeff();
    if ((A + A.transpose()).cwiseAbs().maxCoeff() > skew_tol * std::max(1.0, scale))
        throw std::invalid_argument("pfaffian: matrix not skew-symmetric");

    double result = 1.0;
    for (long k = 0; k + 1 < n; k += 2) {
        long pivot = k + 1;
        for (long i = k + 2; i < n; ++i)
            if (std::abs(A(i, k)) > std::abs(A(pivot, k))) pivot = i;
        if (pivot != k + 1) {
            A.row(k + 1).swap(A.row(pivot));
            A.col(k + 1).swap(A.col(pivot));
            result = -result;
        }
        const double piv = A(k, k + 1);
        if (piv == 0.0) return 0.0;
        result *= piv;
        if (k + 2 < n) {
            RVector tau = A.row(k).segment(k + 2, n - k - 2) / piv;
            auto block = A.block(k + 2, k + 2, n - k - 2, n - k - 2);
            RVector col = A.col(k + 1).segment(k + 2, n - k - 2);
            block += tau * col.transpose() - col * tau.transpose();
        }
    }
    return result;
}

/// Top coefficient of e^omega ^ t_1 ^ ... ^ t_N as pf(A) pf(<t_a, A^{-1} t_b>).
inline double berezin_top(const SkewForm& omega, const std::vector<RVector>& covectors) {
    const int N = static_cast<int>(covectors.size());
    if (omega.dim % 2 != 0) throw std::invalid_argument("berezin_top: odd-dimensional space");
    if (N > omega.dim) throw std::invalid_argument("berezin_top: too many covectors");
    if (N % 2 != 0) return 0.0;
    const double pfA = pfaffian(omega.A);
    if (N == 0) return pfA;
    Eigen::FullPivLU<RMatrix> lu(omega.A);
    if (!lu.isInvertible())
        throw DegenerateKernelError(
            "berezin_top: singular pairing; the kernel-splitting variant is not implemented");
    // Gram pairing <t_a, A^{-1} t_b> with the sign convention fixed by the
    // exterior-algebra oracle (equivalently, the inverse of omega as a
    // bivector is -A^{-1} under omega[v,w] = <v, A w>).
    RMatrix gram(N, N);
    for (int a = 0; a < N; ++a) {
        RVector solved = -lu.solve(covectors[a]);
        for (int b = 0; b < N; ++b) gram(b, a) = covectors[b].dot(solved);
    }
    gram = 0.5 * (gram - gram.transpose().eval());  // symmetrize away roundoff
    return pfA * pfaffian(gram);
}

/// Covector field along a loop: tau and the lifted position to components.
using CovectorField = std::function<std::vector<Complex>(double tau, const std::vector<double>& x)>;

/// Top-degree functional on the flat torus (trivial spinor transport):
///   q = 2^{-N/2} sum_sigma sgn(sigma) int_{Delta_N} str( prod_a c(theta_{sigma_a}(tau_a)) ) dtau.
inline Complex q_eval(const SpinorRep& rep, const DiscreteLoop& loop,
                      const std::vector<CovectorField>& thetas, int quad_order = 8) {
    const int N = static_cast<int>(thetas.size());
    if (!loop.smooth_flag) throw std::invalid_argument("q_eval: loop must be smooth");
    if (N > 4) throw std::invalid_argument("q_eval: N <= 4 supported");
    if (N == 0) return supertrace(rep, CMatrix::Identity(rep.fiber_dim(), rep.fiber_dim()));

    std::vector<int> perm(N);
    for (int i = 0; i < N; ++i) perm[i] = i;
    const int d = rep.fiber_dim();

    Complex total{};
    std::vector<int> p = perm;
    // iterate permutations with sign
    std::function<void(int, int)> rec = [&](int k, int sign) {
        if (k == N) {
            auto integrand = [&](const std::vector<double>& tau) {
                CMatrix prod = CMatrix::Identity(d, d);
                for (int a = 0; a < N; ++a) {
                    auto x = loop.position(tau[a]);
                    auto comps = thetas[p[a]](tau[a], x);
                    CMatrix c = CMatrix::Zero(d, d);
                    for (int j = 0; j < rep.n; ++j) c += comps[j] * rep.gamma[j];
                    prod = prod * c;
                }
                return Complex(supertrace(rep, prod));
            };
            total += static_cast<double>(sign) * integrate_simplex_gauss(N, quad_order, integrand);
            return;
        }
        for (int i = k; i < N; ++i) {
            std::swap(p[k], p[i]);
            rec(k + 1, i == k ? sign : -sign);
            std::swap(p[k], p[i]);
        }
    };
    rec(0, 1);
    return std::pow(2.0, -0.5 * N) * total;
}

/// det(Id - M) for the monodromy M of dY/dt = A(t) Y on [0,1] (RK4).
/// Experimental realization of the zeta-regularized Pfaffian normalization.
inline Complex zeta_det_monodromy(const std::function<CMatrix(double)>& A, int steps = 2048,
                                  double degenerate_tol = 1e-9) {
    const long d = A(0.0).rows();
    CMatrix M = CMatrix::Identity(d, d);
    const double h = 1.0 / steps;
    for (int i = 0; i < steps; ++i) {
        const double t = i * h;
        CMatrix k1 = A(t) * M;
        CMatrix k2 = A(t + 0.5 * h) * (M + 0.5 * h * k1);
        CMatrix k3 = A(t + 0.5 * h) * (M + 0.5 * h * k2);
        CMatrix k4 = A(t + h) * (M + h * k3);
        M += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Eigen::ComplexEigenSolver<CMatrix> es(M);
    for (long i = 0; i < d; ++i)
        if (std::abs(es.eigenvalues()(i) - Complex(1.0, 0.0)) < degenerate_tol)
            throw DegenerateKernelError("zeta_det_monodromy: monodromy has eigenvalue 1");
    return (CMatrix::Identity(d, d) - M).determinant();
}

}  // namespace loopint
