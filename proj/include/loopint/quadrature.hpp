#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace loopint {

struct QuadRule {
    std::vector<double> nodes;    // on [0,1]
    std::vector<double> weights;  // sum to 1
};

/// Gauss-Legendre rule mapped to [0,1], nodes by Newton iteration.
inline QuadRule gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    QuadRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int n = order;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        double w = 1.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

// Ordered simplex 0 <= t1 <= ... <= tN <= 1 parametrized by the cube via
// t_k = s_k s_{k+1} ... s_N, with Jacobian prod_{j>=2} s_j^{j-1}.
inline void simplex_from_cube(const std::vector<double>& s, std::vector<double>& t, double& jac) {
    const std::size_t n = s.size();
    t.resize(n);
    jac = 1.0;
    double acc = 1.0;
    for (std::size_t j = n; j-- > 0;) {
        acc *= s[j];
        t[j] = acc;
    }
    for (std::size_t j = 1; j < n; ++j) jac *= std::pow(s[j], static_cast<double>(j));
}

/// Integrate f over the ordered simplex Delta_N with a tensor Gauss grid.
template <typename F>
auto integrate_simplex_gauss(int dim, int order, F&& f) {
    const QuadRule rule = gauss_legendre(order);
    using R = decltype(f(std::declval<const std::vector<double>&>()));
    R total{};
    if (dim == 0) return f(std::vector<double>{});
    std::vector<int> idx(dim, 0);
    std::vector<double> s(dim), t(dim);
    while (true) {
        double w = 1.0;
        for (int d = 0; d < dim; ++d) {
            s[d] = rule.nodes[idx[d]];
            w *= rule.weights[idx[d]];
        }
        double jac;
        simplex_from_cube(s, t, jac);
        total += f(t) * (w * jac);
        int d = 0;
        while (d < dim && ++idx[d] == order) idx[d++] = 0;
        if (d == dim) break;
    }
    return total;
}

/// Halton low-discrepancy sequence point (index >= 0) in [0,1]^dim.
inline std::vector<double> halton_point(std::size_t index, int dim) {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    std::vector<double> x(dim);
    for (int d = 0; d < dim; ++d) {
        const int b = primes[d % 8];
        double f = 1.0, r = 0.0;
        std::size_t i = index + 1;
        while (i > 0) {
            f /= b;
            r += f * (i % b);
            i /= b;
        }
        x[d] = r;
    }
    return x;
}

/// Quasi-Monte Carlo integration over Delta_N (ordered Halton samples).
template <typename F>
auto integrate_simplex_qmc(int dim, std::size_t samples, F&& f) {
    using R = decltype(f(std::declval<const std::vector<double>&>()));
    R total{};
    if (dim == 0) return f(std::vector<double>{});
    std::vector<double> t(dim);
    for (std::size_t i = 0; i < samples; ++i) {
        std::vector<double> s = halton_point(i, dim);
        double jac;
        simplex_from_cube(s, t, jac);
        total += f(t) * jac;
    }
    return total * (1.0 / static_cast<double>(samples));
}

}  // namespace loopint
