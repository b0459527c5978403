#include "idcais/safety_filter.hpp"

#include "idcais/qcqp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace idcais {

BarrierState barrier_state(const AgentState& xj, const AgentState& xjp, double gain, double collision_radius,
                           std::size_t j, std::size_t jp)
{
    const Vec2 dr = xj.position - xjp.position;
    const Vec2 dv = xj.velocity - xjp.velocity;
    BarrierState s;
    s.h = collision_radius * collision_radius - dr.squaredNorm();
    s.h_dot = -2.0 * dr.dot(dv);
    s.psi = s.h_dot + gain * s.h;
    s.j = j;
    s.jp = jp;
    return s;
}

GainSelection min_gain(const AgentParams& pd, double collision_radius)
{
    pd.validate();
    if (!(collision_radius > 0.0))
        throw ValidationError("min_gain: collision radius must be positive");
    const double c = pd.drag;
    GainSelection g;
    g.braking_distance = pd.accel_bound * (1.0 - std::log(2.0)) / (c * c);
    g.rho0 = 2.0 * g.braking_distance + collision_radius;
    g.k_min = 4.0 * pd.speed_cap() * g.rho0 / (g.rho0 * g.rho0 - collision_radius * collision_radius);
    return g;
}

double PairGains::of(std::size_t j, std::size_t jp) const
{
    const auto key = j < jp ? std::make_pair(j, jp) : std::make_pair(jp, j);
    if (auto it = overrides.find(key); it != overrides.end())
        return it->second;
    return shared;
}

FilterResult filter_controls(const std::vector<AgentState>& defenders, const std::vector<Vec2>& nominal,
                             const PairGains& gains, const AgentParams& pd, double collision_radius,
                             const FilterOptions& opts)
{
    const std::size_t nd = defenders.size();
    if (nominal.size() != nd)
        throw ValidationError("filter_controls: one nominal control per defender required");
    const double bound = pd.accel_bound;
    for (const auto& u : nominal)
        if (!(u.norm() <= bound - 0.5 * pd.margin))
            throw ValidationError("filter_controls: nominal control leaves no margin to the acceleration bound");

    const auto n = static_cast<Eigen::Index>(2 * nd);
    FilterResult result;
    result.corrections.assign(nd, Vec2::Zero());

    qcqp::Problem problem;
    problem.quad = qcqp::Vector::Ones(n);
    problem.linear = qcqp::Vector::Zero(n);
    std::size_t nominal_active = 0;
    for (std::size_t j = 0; j < nd; ++j) {
        for (std::size_t jp = j + 1; jp < nd; ++jp) {
            const double k = gains.of(j, jp);
            const auto bs = barrier_state(defenders[j], defenders[jp], k, collision_radius, j, jp);
            const Vec2 dr = defenders[j].position - defenders[jp].position;
            const Vec2 dv = defenders[j].velocity - defenders[jp].velocity;
            const Vec2 rel_accel = nominal[j] - pd.drag * defenders[j].velocity - nominal[jp] + pd.drag * defenders[jp].velocity;
            double b = -2.0 * k * bs.h_dot - k * k * bs.h + 2.0 * (dv.squaredNorm() + dr.dot(rel_accel));
            qcqp::Vector a = qcqp::Vector::Zero(n);
            a.segment<2>(static_cast<Eigen::Index>(2 * j)) = -2.0 * dr;
            a.segment<2>(static_cast<Eigen::Index>(2 * jp)) = 2.0 * dr;
            if (b <= 0.0) {
                result.active_pairs.emplace_back(j, jp);
                ++nominal_active;
            }
            // Unit-norm rows keep the barrier Hessian well scaled.
            const double scale = a.norm();
            if (scale > 0.0) {
                a /= scale;
                b /= scale;
            }
            problem.rows.push_back({a, b});
        }
    }
    result.too_many_active = nd > 0 && nominal_active >= 2 * nd;

    if (result.active_pairs.empty() || std::all_of(problem.rows.begin(), problem.rows.end(),
                                                    [](const qcqp::LinearRow& r) { return r.b >= 0.0; })) {
        result.multipliers.assign(problem.num_constraints() + nd, 0.0);
        return result;
    }

    for (std::size_t j = 0; j < nd; ++j)
        problem.discs.push_back({2 * j, -nominal[j], bound});

    qcqp::Vector start = qcqp::Vector::Zero(n);
    qcqp::Vector feasible;
    qcqp::Solution sol;
    if (qcqp::find_strictly_feasible(problem, start, feasible)) {
        sol = qcqp::solve_barrier(problem, feasible);
        result.objective = sol.objective;
    } else {
        // Exact-penalty relaxation: du plus one non-negative slack per row.
        result.relaxed = true;
        const auto rows = static_cast<Eigen::Index>(problem.rows.size());
        qcqp::Problem relaxed;
        relaxed.quad = qcqp::Vector::Zero(n + rows);
        relaxed.quad.head(n).setOnes();
        relaxed.linear = qcqp::Vector::Zero(n + rows);
        relaxed.linear.tail(rows).setConstant(opts.relaxation_penalty);
        qcqp::Vector z = qcqp::Vector::Zero(n + rows);
        for (Eigen::Index r = 0; r < rows; ++r) {
            qcqp::Vector a = qcqp::Vector::Zero(n + rows);
            a.head(n) = problem.rows[static_cast<std::size_t>(r)].a;
            a[n + r] = -1.0;
            relaxed.rows.push_back({a, problem.rows[static_cast<std::size_t>(r)].b});
            qcqp::Vector neg = qcqp::Vector::Zero(n + rows);
            neg[n + r] = -1.0;
            relaxed.rows.push_back({neg, 0.0});
            z[n + r] = std::max(0.0, -problem.rows[static_cast<std::size_t>(r)].b) + 1.0;
        }
        relaxed.discs = problem.discs;
        sol = qcqp::solve_barrier(relaxed, z);
        result.objective = sol.x.head(n).squaredNorm();
    }

    for (std::size_t j = 0; j < nd; ++j) {
        Vec2 du = sol.x.segment<2>(static_cast<Eigen::Index>(2 * j));
        // The polished iterate may sit on the disc up to rounding.
        const Vec2 u = nominal[j] + du;
        if (u.norm() > bound)
            du = u * (bound * (1.0 - 8.0 * std::numeric_limits<double>::epsilon()) / u.norm()) - nominal[j];
        result.corrections[j] = du;
    }
    result.kkt_residual = sol.kkt_residual;
    result.multipliers.assign(sol.multipliers.data(), sol.multipliers.data() + sol.multipliers.size());
    if (result.kkt_residual > opts.kkt_tolerance)
        throw SolverError("filter_controls: interior point did not reach the KKT tolerance");
    return result;
}

}  // namespace idcais
