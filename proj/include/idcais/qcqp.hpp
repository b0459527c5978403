#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace idcais::qcqp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// a^T x <= b
struct LinearRow {
    Vector a;
    double b;
};

/// ||x[index:index+2] - center||^2 <= radius^2
struct DiscRow {
    std::size_t index;
    Eigen::Vector2d center;
    double radius;
};

/// minimize  sum_k quad[k] x_k^2 + linear^T x  subject to linear and disc rows.
/// `quad` must be non-negative.
struct Problem {
    Vector quad;
    Vector linear;
    std::vector<LinearRow> rows;
    std::vector<DiscRow> discs;

    std::size_t dim() const { return static_cast<std::size_t>(quad.size()); }
    std::size_t num_constraints() const { return rows.size() + discs.size(); }

    double objective(const Vector& x) const;
    /// Constraint values g_i(x) (feasible iff all <= 0), rows first then discs.
    Vector constraints(const Vector& x) const;
};

struct Options {
    double initial_t = 1.0;            ///< divided by the largest objective coefficient
    double t_growth = 10.0;
    double gap_tolerance = 1e-10;      ///< m / t at termination
    double newton_tolerance = 1e-14;   ///< lambda^2 / 2
    int max_newton_iterations = 200;
};

struct Solution {
    Vector x;
    Vector multipliers;  ///< rows first then discs
    double objective = 0.0;
    double kkt_residual = 0.0;
    int newton_iterations = 0;
    bool converged = false;
};

/// Log-barrier interior point from a strictly feasible start.
Solution solve_barrier(const Problem& problem, const Vector& strictly_feasible, const Options& opts = {});

/// Max of stationarity, primal infeasibility, dual infeasibility and complementarity violations.
double kkt_residual(const Problem& problem, const Vector& x, const Vector& multipliers);

/// Searches for a strictly feasible point (min s s.t. rows <= s, discs <= 0)
/// starting from `start`, which must satisfy every disc strictly. Returns
/// false when the rows cannot all be made strictly negative.
bool find_strictly_feasible(const Problem& problem, const Vector& start, Vector& out, const Options& opts = {});

}  // namespace idcais::qcqp
