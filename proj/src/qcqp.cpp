#include "idcais/qcqp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace idcais::qcqp {

double Problem::objective(const Vector& x) const { return quad.dot(x.cwiseProduct(x)) + linear.dot(x); }

Vector Problem::constraints(const Vector& x) const
{
    Vector g(static_cast<Eigen::Index>(num_constraints()));
    Eigen::Index k = 0;
    for (const auto& r : rows)
        g[k++] = r.a.dot(x) - r.b;
    for (const auto& d : discs)
        g[k++] = (x.segment<2>(static_cast<Eigen::Index>(d.index)) - d.center).squaredNorm() - d.radius * d.radius;
    return g;
}

double kkt_residual(const Problem& p, const Vector& x, const Vector& mu);

namespace {

struct Derivatives {
    Vector grad;
    Matrix hess;
};

// Gradient and Hessian of t * f(x) - sum log(-g_i(x)); requires strict feasibility.
Derivatives barrier_derivatives(const Problem& p, const Vector& x, double t)
{
    const auto n = static_cast<Eigen::Index>(p.dim());
    Derivatives d{t * (2.0 * p.quad.cwiseProduct(x) + p.linear), Matrix::Zero(n, n)};
    d.hess.diagonal() = 2.0 * t * p.quad;
    for (const auto& r : p.rows) {
        const double g = r.a.dot(x) - r.b;
        d.grad -= r.a / g;
        d.hess.noalias() += r.a * r.a.transpose() / (g * g);
    }
    for (const auto& disc : p.discs) {
        const auto i = static_cast<Eigen::Index>(disc.index);
        const Eigen::Vector2d off = x.segment<2>(i) - disc.center;
        const double g = off.squaredNorm() - disc.radius * disc.radius;
        const Eigen::Vector2d gg = 2.0 * off;
        d.grad.segment<2>(i) -= gg / g;
        d.hess.block<2, 2>(i, i) += gg * gg.transpose() / (g * g) - 2.0 * Eigen::Matrix2d::Identity() / g;
    }
    return d;
}

double barrier_value(const Problem& p, const Vector& x, double t)
{
    const Vector g = p.constraints(x);
    if ((g.array() >= 0.0).any())
        return std::numeric_limits<double>::infinity();
    return t * p.objective(x) - (-g.array()).log().sum();
}

// Newton on the KKT equalities of the constraints the barrier iterate marks
// as active. Returns false when the refined point is not a KKT point.
bool polish(const Problem& p, Vector& x, Vector& mu)
{
    const auto n = static_cast<Eigen::Index>(p.dim());
    const Vector g0 = p.constraints(x);
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < g0.size(); ++i)
        if (mu[i] > -g0[i])
            active.push_back(i);
    const auto na = static_cast<Eigen::Index>(active.size());
    const auto nrows = static_cast<Eigen::Index>(p.rows.size());

    Vector z(n + na);
    z.head(n) = x;
    for (Eigen::Index k = 0; k < na; ++k)
        z[n + k] = mu[active[static_cast<std::size_t>(k)]];

    auto gradient = [&](Eigen::Index i, const Vector& xx) {
        Vector gr = Vector::Zero(n);
        if (i < nrows) {
            gr = p.rows[static_cast<std::size_t>(i)].a;
        } else {
            const auto& d = p.discs[static_cast<std::size_t>(i - nrows)];
            const auto at = static_cast<Eigen::Index>(d.index);
            gr.segment<2>(at) = 2.0 * (xx.segment<2>(at) - d.center);
        }
        return gr;
    };
    auto residual = [&](const Vector& zz) {
        const Vector xx = zz.head(n);
        Vector r(n + na);
        r.head(n) = 2.0 * p.quad.cwiseProduct(xx) + p.linear;
        const Vector g = p.constraints(xx);
        for (Eigen::Index k = 0; k < na; ++k) {
            const Eigen::Index i = active[static_cast<std::size_t>(k)];
            r.head(n) += zz[n + k] * gradient(i, xx);
            r[n + k] = g[i];
        }
        return r;
    };

    Vector r = residual(z);
    for (int it = 0; it < 50 && r.lpNorm<Eigen::Infinity>() > 1e-15; ++it) {
        const Vector xx = z.head(n);
        Matrix jac = Matrix::Zero(n + na, n + na);
        jac.topLeftCorner(n, n).diagonal() = 2.0 * p.quad;
        for (Eigen::Index k = 0; k < na; ++k) {
            const Eigen::Index i = active[static_cast<std::size_t>(k)];
            const Vector gr = gradient(i, xx);
            jac.block(0, n + k, n, 1) = gr;
            jac.block(n + k, 0, 1, n) = gr.transpose();
            if (i >= nrows) {
                const auto at = static_cast<Eigen::Index>(p.discs[static_cast<std::size_t>(i - nrows)].index);
                jac.block<2, 2>(at, at) += 2.0 * z[n + k] * Eigen::Matrix2d::Identity();
            }
        }
        const Vector step = jac.completeOrthogonalDecomposition().solve(-r);
        const Vector cand = z + step;
        const Vector rc = residual(cand);
        if (!(rc.lpNorm<Eigen::Infinity>() < r.lpNorm<Eigen::Infinity>()))
            break;
        z = cand;
        r = rc;
    }

    Vector mu_new = Vector::Zero(mu.size());
    for (Eigen::Index k = 0; k < na; ++k)
        mu_new[active[static_cast<std::size_t>(k)]] = z[n + k];
    const Vector x_new = z.head(n);
    if (!(kkt_residual(p, x_new, mu_new) < kkt_residual(p, x, mu)))
        return false;
    x = x_new;
    mu = mu_new;
    return true;
}

}  // namespace

double kkt_residual(const Problem& p, const Vector& x, const Vector& mu)
{
    Vector stationarity = 2.0 * p.quad.cwiseProduct(x) + p.linear;
    Eigen::Index k = 0;
    for (const auto& r : p.rows)
        stationarity += mu[k++] * r.a;
    for (const auto& d : p.discs) {
        const auto i = static_cast<Eigen::Index>(d.index);
        stationarity.segment<2>(i) += mu[k++] * 2.0 * (x.segment<2>(i) - d.center);
    }
    const Vector g = p.constraints(x);
    double res = stationarity.size() > 0 ? stationarity.lpNorm<Eigen::Infinity>() : 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        res = std::max(res, std::max(0.0, g[i]));
        res = std::max(res, std::max(0.0, -mu[i]));
        res = std::max(res, std::abs(mu[i] * g[i]));
    }
    return res;
}

Solution solve_barrier(const Problem& p, const Vector& start, const Options& opts)
{
    Solution sol;
    sol.x = start;
    const double m = static_cast<double>(p.num_constraints());
    if ((p.constraints(start).array() >= 0.0).any())
        throw std::invalid_argument("solve_barrier: start is not strictly feasible");

    // Large objective coefficients (slack penalties) would otherwise start
    // the path far from centrality.
    const double coeff = std::max({1.0, p.quad.size() ? p.quad.lpNorm<Eigen::Infinity>() : 0.0,
                                   p.linear.size() ? p.linear.lpNorm<Eigen::Infinity>() : 0.0});
    double t = opts.initial_t / coeff;
    for (;;) {
        for (int it = 0; it < opts.max_newton_iterations; ++it) {
            const auto d = barrier_derivatives(p, sol.x, t);
            const Vector step = -d.hess.ldlt().solve(d.grad);
            const double decrement = -d.grad.dot(step);
            ++sol.newton_iterations;
            if (!(decrement > 2.0 * opts.newton_tolerance))
                break;
            const double f0 = barrier_value(p, sol.x, t);
            double s = 1.0;
            bool moved = false;
            while (s > 1e-20) {
                const Vector cand = sol.x + s * step;
                const double f1 = barrier_value(p, cand, t);
                if (f1 <= f0 - 0.25 * s * decrement) {
                    sol.x = cand;
                    moved = true;
                    break;
                }
                s *= 0.5;
            }
            if (!moved)
                break;
        }
        if (m == 0.0 || m / t < opts.gap_tolerance)
            break;
        t *= opts.t_growth;
    }

    const Vector g = p.constraints(sol.x);
    sol.multipliers = (-1.0 / (t * g.array())).matrix();
    polish(p, sol.x, sol.multipliers);
    sol.objective = p.objective(sol.x);
    sol.kkt_residual = kkt_residual(p, sol.x, sol.multipliers);
    sol.converged = true;
    return sol;
}

bool find_strictly_feasible(const Problem& p, const Vector& start, Vector& out, const Options& opts)
{
    const auto n = static_cast<Eigen::Index>(p.dim());
    Vector g0 = p.constraints(start);
    for (std::size_t k = 0; k < p.discs.size(); ++k)
        if (!(g0[static_cast<Eigen::Index>(p.rows.size() + k)] < 0.0))
            throw std::invalid_argument("find_strictly_feasible: start must satisfy every disc strictly");
    if (p.rows.empty() || (g0.head(static_cast<Eigen::Index>(p.rows.size())).array() < 0.0).all()) {
        out = start;
        return true;
    }

    // Phase I over (x, s): minimize s subject to a^T x - b - s <= 0 and the discs.
    Problem aux;
    aux.quad = Vector::Zero(n + 1);
    aux.linear = Vector::Zero(n + 1);
    aux.linear[n] = 1.0;
    for (const auto& r : p.rows) {
        Vector a(n + 1);
        a.head(n) = r.a;
        a[n] = -1.0;
        aux.rows.push_back({a, r.b});
    }
    aux.discs = p.discs;

    Vector z(n + 1);
    z.head(n) = start;
    z[n] = g0.head(static_cast<Eigen::Index>(p.rows.size())).maxCoeff() + 1.0;

    const double m = static_cast<double>(aux.num_constraints());
    double t = opts.initial_t;
    for (;;) {
        for (int it = 0; it < opts.max_newton_iterations; ++it) {
            if (z[n] < 0.0) {
                const Vector rows = p.constraints(z.head(n)).head(static_cast<Eigen::Index>(p.rows.size()));
                if ((rows.array() < 0.0).all()) {
                    out = z.head(n);
                    return true;
                }
            }
            const auto d = barrier_derivatives(aux, z, t);
            const Vector step = -d.hess.ldlt().solve(d.grad);
            const double decrement = -d.grad.dot(step);
            if (!(decrement > 2.0 * opts.newton_tolerance))
                break;
            const double f0 = barrier_value(aux, z, t);
            double s = 1.0;
            bool moved = false;
            while (s > 1e-20) {
                const Vector cand = z + s * step;
                if (barrier_value(aux, cand, t) <= f0 - 0.25 * s * decrement) {
                    z = cand;
                    moved = true;
                    break;
                }
                s *= 0.5;
            }
            if (!moved)
                break;
        }
        if (m / t < opts.gap_tolerance)
            break;
        t *= opts.t_growth;
    }
    return false;
}

}  // namespace idcais::qcqp
