#pragma once

#include "idcais/dynamics.hpp"

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

namespace idcais {

/// Exponential barrier bookkeeping for one defender pair.
///   h = rho_col^2 - ||r_j - r_j'||^2   (safe iff h <= 0)
///   h_dot = -2 (r_j - r_j')^T (v_j - v_j')
///   psi = h_dot + k h
struct BarrierState {
    double h = 0.0;
    double h_dot = 0.0;
    double psi = 0.0;
    std::size_t j = 0;
    std::size_t jp = 1;
};

BarrierState barrier_state(const AgentState& xj, const AgentState& xjp, double gain, double collision_radius,
                           std::size_t j = 0, std::size_t jp = 1);

/// Braking distance, the initial-separation radius rho_0 = 2 rho_b + rho_col,
/// and the smallest barrier gain that keeps psi <= 0 at separation rho_0 for
/// any pair of admissible velocities.
struct GainSelection {
    double braking_distance;
    double rho0;
    double k_min;
};

GainSelection min_gain(const AgentParams& pd, double collision_radius);

/// Barrier gain per defender pair; pairs without an override use `shared`.
struct PairGains {
    double shared = 0.0;
    std::map<std::pair<std::size_t, std::size_t>, double> overrides;

    double of(std::size_t j, std::size_t jp) const;
};

struct FilterOptions {
    double relaxation_penalty = 1e6;
    double kkt_tolerance = 1e-8;
};

struct FilterResult {
    std::vector<Vec2> corrections;
    /// Pairs whose barrier row is violated or tight at zero correction.
    std::vector<std::pair<std::size_t, std::size_t>> active_pairs;
    double kkt_residual = 0.0;
    double objective = 0.0;
    /// Set when the barrier rows were jointly infeasible and the slack-penalized problem was solved.
    bool relaxed = false;
    /// Active rows at zero correction reached 2 * N_d.
    bool too_many_active = false;
    /// Row-then-disc multipliers of the solved problem (slack rows included when relaxed).
    std::vector<double> multipliers;
};

/// Minimally corrects the nominal defender controls so that every pairwise
/// barrier row A_jj' du <= b_jj' holds and every corrected control stays in
/// its disc ||u_j + du_j|| <= accel_bound.
///
/// Nominal controls must satisfy ||u_j|| <= accel_bound - margin / 2.
FilterResult filter_controls(const std::vector<AgentState>& defenders, const std::vector<Vec2>& nominal,
                             const PairGains& gains, const AgentParams& pd, double collision_radius,
                             const FilterOptions& opts = {});

}  // namespace idcais
