#pragma once

// Discretized torus loops. Positions are stored as lifted points in R^n with
// the winding encoded by the endpoint offset: gamma(tau + 1) = gamma(tau) + w.
// Off-grid evaluation is cubic Hermite; node tangents use five-point central
// differences on uniform grids, so interpolated velocities stay well below
// the finite-difference tolerances of the chain-map tests.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace loopint {

namespace detail {

/// Periodic curve on [0,1) with per-period affine offset (zero for fields).
struct PeriodicCurve {
    std::vector<double> grid;                 // strictly increasing in [0,1)
    std::vector<std::vector<double>> values;  // one point per grid node
    std::vector<double> offset;               // value(t+1) = value(t) + offset
    bool uniform = true;

    std::size_t size() const { return grid.size(); }
    int dim() const { return values.empty() ? 0 : static_cast<int>(values.front().size()); }

    std::vector<double> node(long long i) const {
        const long long m = static_cast<long long>(grid.size());
        long long wrap = static_cast<long long>(std::floor(static_cast<double>(i) / m));
        long long base = i - wrap * m;
        std::vector<double> v = values[static_cast<std::size_t>(base)];
        if (wrap != 0)
            for (int d = 0; d < dim(); ++d) v[d] += static_cast<double>(wrap) * offset[d];
        return v;
    }

    double node_time(long long i) const {
        const long long m = static_cast<long long>(grid.size());
        long long wrap = static_cast<long long>(std::floor(static_cast<double>(i) / m));
        return grid[static_cast<std::size_t>(i - wrap * m)] + static_cast<double>(wrap);
    }

    std::vector<double> tangent(long long i) const {
        const int d = dim();
        std::vector<double> out(d, 0.0);
        if (uniform && size() >= 5) {
            const double h = node_time(i + 1) - node_time(i);
            auto pm2 = node(i - 2), pm1 = node(i - 1), pp1 = node(i + 1), pp2 = node(i + 2);
            for (int k = 0; k < d; ++k)
                out[k] = (pm2[k] - 8.0 * pm1[k] + 8.0 * pp1[k] - pp2[k]) / (12.0 * h);
        } else {
            auto pm1 = node(i - 1), pp1 = node(i + 1);
            const double dt = node_time(i + 1) - node_time(i - 1);
            for (int k = 0; k < d; ++k) out[k] = (pp1[k] - pm1[k]) / dt;
        }
        return out;
    }

    void locate(double t, long long& seg, double& local, double& h) const {
        const double shift = std::floor(t);
        const double tau = t - shift;
        std::size_t lo = 0, hi = grid.size();
        while (lo + 1 < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (grid[mid] <= tau)
                lo = mid;
            else
                hi = mid;
        }
        seg = static_cast<long long>(lo) + static_cast<long long>(shift) * static_cast<long long>(grid.size());
        const double t0 = node_time(seg), t1 = node_time(seg + 1);
        h = t1 - t0;
        local = (t - t0) / h;
    }

    std::vector<double> value(double t) const {
        long long seg;
        double u, h;
        locate(t, seg, u, h);
        auto p0 = node(seg), p1 = node(seg + 1);
        auto m0 = tangent(seg), m1 = tangent(seg + 1);
        const double u2 = u * u, u3 = u2 * u;
        const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
        const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
        std::vector<double> out(dim());
        for (int k = 0; k < dim(); ++k)
            out[k] = h00 * p0[k] + h10 * h * m0[k] + h01 * p1[k] + h11 * h * m1[k];
        return out;
    }

    std::vector<double> derivative(double t) const {
        long long seg;
        double u, h;
        locate(t, seg, u, h);
        auto p0 = node(seg), p1 = node(seg + 1);
        auto m0 = tangent(seg), m1 = tangent(seg + 1);
        const double u2 = u * u;
        const double d00 = (6 * u2 - 6 * u) / h, d10 = 3 * u2 - 4 * u + 1;
        const double d01 = (-6 * u2 + 6 * u) / h, d11 = 3 * u2 - 2 * u;
        std::vector<double> out(dim());
        for (int k = 0; k < dim(); ++k)
            out[k] = d00 * p0[k] + d10 * m0[k] + d01 * p1[k] + d11 * m1[k];
        return out;
    }
};

inline bool is_uniform(const std::vector<double>& grid) {
    if (grid.size() < 2) return true;
    const double h = grid[1] - grid[0];
    for (std::size_t i = 1; i + 1 < grid.size(); ++i)
        if (std::abs((grid[i + 1] - grid[i]) - h) > 1e-12) return false;
    return true;
}

}  // namespace detail

struct DiscreteLoop {
    int n = 2;
    std::vector<double> grid;                 // M samples, strictly increasing in [0,1)
    std::vector<std::vector<double>> points;  // lifted positions in R^n
    std::vector<int> winding;                 // endpoint offset, integral
    bool smooth_flag = false;

    detail::PeriodicCurve curve() const {
        detail::PeriodicCurve c;
        c.grid = grid;
        c.values = points;
        c.offset.assign(winding.begin(), winding.end());
        c.uniform = detail::is_uniform(grid);
        return c;
    }

    void validate() const {
        if (points.size() != grid.size()) throw std::invalid_argument("DiscreteLoop: grid/point mismatch");
        for (std::size_t i = 0; i + 1 < grid.size(); ++i)
            if (grid[i + 1] <= grid[i]) throw std::invalid_argument("DiscreteLoop: grid not increasing");
        if (!grid.empty() && (grid.front() < 0.0 || grid.back() >= 1.0))
            throw std::invalid_argument("DiscreteLoop: grid must lie in [0,1)");
        if (static_cast<int>(winding.size()) != n) throw std::invalid_argument("DiscreteLoop: bad winding");
    }

    std::vector<double> position(double tau) const { return cached_curve().value(tau); }
    std::vector<double> velocity(double tau) const { return cached_curve().derivative(tau); }

    std::vector<double> torus_position(double tau) const {
        auto x = position(tau);
        for (double& c : x) c -= std::floor(c);
        return x;
    }

    /// Sample a smooth lifted parametrization on a uniform grid of M points.
    static DiscreteLoop sample(int n, int M, const std::function<std::vector<double>(double)>& lifted,
                               std::vector<int> winding) {
        DiscreteLoop loop;
        loop.n = n;
        loop.winding = std::move(winding);
        loop.smooth_flag = true;
        loop.grid.resize(M);
        loop.points.resize(M);
        for (int i = 0; i < M; ++i) {
            loop.grid[i] = static_cast<double>(i) / M;
            loop.points[i] = lifted(loop.grid[i]);
        }
        loop.validate();
        return loop;
    }

private:
    mutable bool have_curve_ = false;
    mutable detail::PeriodicCurve curve_;

    const detail::PeriodicCurve& cached_curve() const {
        if (!have_curve_) {
            curve_ = curve();
            have_curve_ = true;
        }
        return curve_;
    }
};

struct TangentField {
    std::vector<double> grid;
    std::vector<std::vector<double>> vectors;

    static TangentField sample(const DiscreteLoop& loop,
                               const std::function<std::vector<double>(double)>& field) {
        TangentField f;
        f.grid = loop.grid;
        f.vectors.resize(loop.grid.size());
        for (std::size_t i = 0; i < loop.grid.size(); ++i) f.vectors[i] = field(loop.grid[i]);
        return f;
    }

    static TangentField constant(const DiscreteLoop& loop, std::vector<double> v) {
        return sample(loop, [v](double) { return v; });
    }

    std::vector<double> value(double tau) const { return cached_curve().value(tau); }

private:
    mutable bool have_curve_ = false;
    mutable detail::PeriodicCurve curve_;

    const detail::PeriodicCurve& cached_curve() const {
        if (!have_curve_) {
            curve_.grid = grid;
            curve_.values = vectors;
            curve_.offset.assign(vectors.front().size(), 0.0);
            curve_.uniform = detail::is_uniform(grid);
            have_curve_ = true;
        }
        return curve_;
    }
};

}  // namespace loopint
