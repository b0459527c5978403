// Reference computations that share no code with the library.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace oracle {

using V2 = Eigen::Vector2d;

struct State {
    V2 r;
    V2 v;
};

// Classical RK4 on r' = v, v' = u - c v.
inline State rk4(State s, const V2& u, double c, double t, std::size_t steps)
{
    const double h = t / static_cast<double>(steps);
    auto f = [&](const State& x) { return State{x.v, u - c * x.v}; };
    auto add = [](const State& a, const State& k, double w) { return State{a.r + w * k.r, a.v + w * k.v}; };
    for (std::size_t i = 0; i < steps; ++i) {
        const State k1 = f(s);
        const State k2 = f(add(s, k1, h / 2));
        const State k3 = f(add(s, k2, h / 2));
        const State k4 = f(add(s, k3, h));
        s.r += h / 6 * (k1.r + 2 * k2.r + 2 * k3.r + k4.r);
        s.v += h / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
    }
    return s;
}

// Position under constant acceleration, written out from the ODE solution
// v(t) = u/c + (v0 - u/c) e^{-ct}.
inline V2 position(const State& s, const V2& u, double c, double t)
{
    const double decay = std::exp(-c * t);
    return s.r + u / c * t + (s.v - u / c) * (1.0 - decay) / c;
}

// Earliest sample time k*step in [0, horizon] with distance <= sep.
inline std::optional<double> dense_collision(const State& a, const V2& ua, const State& b, const V2& ub, double c,
                                             double sep, double horizon, double step = 1e-4)
{
    const auto n = static_cast<std::size_t>(std::ceil(horizon / step));
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = std::min(horizon, static_cast<double>(k) * step);
        if ((position(a, ua, c, t) - position(b, ub, c, t)).norm() <= sep)
            return t;
    }
    return std::nullopt;
}

// Minimum distance to `target` reachable at time t over all constant
// headings: coarse heading grid followed by golden-section refinement.
inline double closest_over_headings(const State& s, const V2& target, double bound, double c, double t,
                                    std::size_t headings = 720)
{
    auto dist = [&](double th) { return (position(s, bound * V2(std::cos(th), std::sin(th)), c, t) - target).norm(); };
    const double pi = std::acos(-1.0);
    double best = std::numeric_limits<double>::infinity();
    double best_th = 0.0;
    for (std::size_t k = 0; k < headings; ++k) {
        const double th = 2 * pi * static_cast<double>(k) / static_cast<double>(headings);
        const double d = dist(th);
        if (d < best) {
            best = d;
            best_th = th;
        }
    }
    const double width = 2 * pi / static_cast<double>(headings);
    double lo = best_th - width;
    double hi = best_th + width;
    const double g = (std::sqrt(5.0) - 1) / 2;
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = dist(x1);
    double f2 = dist(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = dist(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = dist(x2);
        }
    }
    return std::min({best, f1, f2});
}

// Earliest time in [0, t_end] at which some constant heading brings the
// agent within `reach` of the target. The reachable disc's center drifts at
// most at |v0| and its radius grows at most at bound / c, so steps of the
// distance margin over their sum never skip an approach.
inline std::optional<double> grid_min_time(const State& s, const V2& target, double bound, double c, double t_end,
                                           double reach, std::size_t* evaluations = nullptr)
{
    const double speed = s.v.norm() + bound / c + 1e-12;
    double t = 0.0;
    while (t <= t_end) {
        const double d = closest_over_headings(s, target, bound, c, t);
        if (evaluations)
            ++*evaluations;
        if (d <= reach)
            return t;
        t += std::max(1e-10, (d - reach) / speed);
    }
    return std::nullopt;
}

// Exhaustive assignment over injective attacker -> defender maps via
// next_permutation. Returns the minimal objective.
template <class Int, class Col>
double brute_force_assignment(std::size_t nd, std::size_t na, Int interception, Col collision, double w)
{
    std::vector<std::size_t> perm(nd);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        // perm[i] for i < na is attacker i's defender; the ordering of the
        // unused tail does not matter but is enumerated anyway.
        double ci = 0.0;
        double cc = 0.0;
        for (std::size_t i = 0; i < na; ++i)
            ci += interception(perm[i], i);
        for (std::size_t i = 0; i < na; ++i)
            for (std::size_t ip = 0; ip < na; ++ip)
                if (i != ip)
                    cc += collision(perm[i], i, perm[ip], ip);
        best = std::min(best, (1 - w) * ci + w * cc);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Euclidean projection of the origin onto {a.x <= b} intersected with two
// discs {||x_k - c_k|| <= r} (x = [x_0; x_1]) by Dykstra's alternating
// projections.
inline Eigen::Vector4d dykstra(const Eigen::Vector4d& a, double b, const std::array<V2, 2>& centers, double radius,
                               int iterations = 200000)
{
    Eigen::Vector4d x = Eigen::Vector4d::Zero();
    Eigen::Vector4d p = Eigen::Vector4d::Zero();
    Eigen::Vector4d q = Eigen::Vector4d::Zero();
    auto half = [&](const Eigen::Vector4d& y) {
        const double s = a.dot(y) - b;
        return s <= 0 ? y : Eigen::Vector4d(y - s / a.squaredNorm() * a);
    };
    auto discs = [&](const Eigen::Vector4d& y) {
        Eigen::Vector4d z = y;
        for (int k = 0; k < 2; ++k) {
            const V2 off = y.segment<2>(2 * k) - centers[static_cast<std::size_t>(k)];
            if (off.norm() > radius)
                z.segment<2>(2 * k) = centers[static_cast<std::size_t>(k)] + radius * off.normalized();
        }
        return z;
    };
    for (int it = 0; it < iterations; ++it) {
        const Eigen::Vector4d y = half(x + p);
        p = x + p - y;
        const Eigen::Vector4d xn = discs(y + q);
        q = y + q - xn;
        const double change = (xn - x).lpNorm<Eigen::Infinity>();
        x = xn;
        if (change < 1e-15 && it > 10)
            break;
    }
    return x;
}

// Minimal correction for two defenders: the second-order barrier condition
// hdd + 2 k hd + k^2 h <= 0 on the corrected accelerations, with each
// corrected control inside its disc. Returns [du_0; du_1].
struct FilterReference {
    Eigen::Vector4d dykstra;
    double dykstra_objective;
    double grid_objective;  // best feasible point of a coarse grid refined by pattern search
};

inline FilterReference filter_reference(const std::array<State, 2>& d, const std::array<V2, 2>& u, double k,
                                        double rho, double c, double bound)
{
    const V2 dr = d[0].r - d[1].r;
    const V2 dv = d[0].v - d[1].v;
    const double h = rho * rho - dr.squaredNorm();
    const double hd = -2 * dr.dot(dv);
    const V2 acc = (u[0] - c * d[0].v) - (u[1] - c * d[1].v);
    const double hdd = -2 * (dv.squaredNorm() + dr.dot(acc));
    // hdd changes by -2 dr.(du_0 - du_1).
    Eigen::Vector4d a;
    a << -2 * dr, 2 * dr;
    const double b = -(hdd + 2 * k * hd + k * k * h);
    const std::array<V2, 2> centers{-u[0], -u[1]};

    FilterReference ref;
    ref.dykstra = dykstra(a, b, centers, bound);
    ref.dykstra_objective = ref.dykstra.squaredNorm();

    auto feasible = [&](const Eigen::Vector4d& x) {
        return a.dot(x) <= b && (x.segment<2>(0) - centers[0]).norm() <= bound &&
               (x.segment<2>(2) - centers[1]).norm() <= bound;
    };
    const int n = 15;
    double best = std::numeric_limits<double>::infinity();
    Eigen::Vector4d x_best = Eigen::Vector4d::Zero();
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2)
                for (int i3 = 0; i3 < n; ++i3) {
                    const std::array<int, 4> idx{i0, i1, i2, i3};
                    Eigen::Vector4d x;
                    for (int q = 0; q < 4; ++q)
                        x[q] = centers[static_cast<std::size_t>(q / 2)][q % 2] - bound +
                               2 * bound * idx[static_cast<std::size_t>(q)] / (n - 1);
                    if (feasible(x) && x.squaredNorm() < best) {
                        best = x.squaredNorm();
                        x_best = x;
                    }
                }
    // Pattern search over coordinate and diagonal directions.
    double step = 2 * bound / (n - 1);
    std::vector<Eigen::Vector4d> dirs;
    for (int q = 0; q < 4; ++q) {
        dirs.push_back(Eigen::Vector4d::Unit(q));
        dirs.push_back(-Eigen::Vector4d::Unit(q));
    }
    for (int q = 0; q < 4; ++q)
        for (int r = q + 1; r < 4; ++r)
            for (int sq : {-1, 1})
                for (int sr : {-1, 1}) {
                    Eigen::Vector4d e = Eigen::Vector4d::Zero();
                    e[q] = sq;
                    e[r] = sr;
                    dirs.push_back(e.normalized());
                }
    dirs.push_back(-a.normalized());
    while (step > 1e-10 && std::isfinite(best)) {
        bool moved = false;
        for (const auto& e : dirs) {
            // Slide along the row: move then pull back onto a.x = b when needed.
            Eigen::Vector4d x = x_best + step * e;
            const double s = a.dot(x) - b;
            if (s > 0)
                x -= s / a.squaredNorm() * a;
            if (feasible(x) && x.squaredNorm() < best) {
                best = x.squaredNorm();
                x_best = x;
                moved = true;
            }
        }
        if (!moved)
            step *= 0.5;
    }
    ref.grid_objective = best;
    return ref;
}

}  // namespace oracle
