#include "idcais/collision_forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace idcais {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b)
{
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0)
        return (p - a).norm();
    const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + s * ab)).norm();
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2)
{
    const double d1 = cross(q2 - q1, p1 - q1);
    const double d2 = cross(q2 - q1, p2 - q1);
    const double d3 = cross(p2 - p1, q1 - p1);
    const double d4 = cross(p2 - p1, q2 - p1);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    // Collinear or touching configurations are covered by the distance path.
    return false;
}

double segment_distance(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2)
{
    if (segments_intersect(p1, p2, q1, q2))
        return 0.0;
    return std::min({point_segment_distance(p1, q1, q2), point_segment_distance(p2, q1, q2),
                     point_segment_distance(q1, p1, p2), point_segment_distance(q2, p1, p2)});
}

struct Hull {
    std::array<Vec2, 3> v;
    int n;  // 2 for a segment, 3 for a triangle
};

Hull as_hull(const TrajectoryTriangle& t) { return {t.vertices, t.degenerate ? 2 : 3}; }

bool inside_triangle(const Vec2& p, const std::array<Vec2, 3>& v)
{
    const double c0 = cross(v[1] - v[0], p - v[0]);
    const double c1 = cross(v[2] - v[1], p - v[1]);
    const double c2 = cross(v[0] - v[2], p - v[2]);
    return (c0 >= 0 && c1 >= 0 && c2 >= 0) || (c0 <= 0 && c1 <= 0 && c2 <= 0);
}

TrajectoryTriangle segment_hull(const Vec2& a, const Vec2& b) { return {{a, b, b}, true}; }

// Circumscribing triangle of sampled points inflated by the chord-deviation bound.
TrajectoryTriangle sampled_hull(const ConstantControlPath& path, double t_final)
{
    constexpr int kSamples = 32;
    std::array<Vec2, kSamples + 1> pts;
    for (int k = 0; k <= kSamples; ++k)
        pts[k] = path.position(t_final * k / kSamples);

    const double dt = t_final / kSamples;
    const double speed_bound = std::max(path.start.velocity.norm(), path.control.norm() / path.drag);
    const double accel_bound = path.control.norm() + path.drag * speed_bound;
    const double margin = dt * dt / 8.0 * accel_bound + 1e-9;

    double best_area = std::numeric_limits<double>::infinity();
    TrajectoryTriangle best;
    constexpr int kOrientations = 24;
    for (int o = 0; o < kOrientations; ++o) {
        const double phi0 = (2.0 * std::numbers::pi / 3.0) * o / kOrientations;
        std::array<Vec2, 3> normals;
        std::array<double, 3> offsets;
        for (int k = 0; k < 3; ++k) {
            normals[k] = heading_vector(phi0 + 2.0 * std::numbers::pi * k / 3.0);
            double h = -std::numeric_limits<double>::infinity();
            for (const auto& p : pts)
                h = std::max(h, normals[k].dot(p));
            offsets[k] = h + margin;
        }
        TrajectoryTriangle tri;
        for (int k = 0; k < 3; ++k) {
            const int a = (k + 1) % 3;
            const int b = (k + 2) % 3;
            Eigen::Matrix2d m;
            m.row(0) = normals[a].transpose();
            m.row(1) = normals[b].transpose();
            tri.vertices[k] = m.inverse() * Vec2(offsets[a], offsets[b]);
        }
        const double area = 0.5 * std::abs(cross(tri.vertices[1] - tri.vertices[0], tri.vertices[2] - tri.vertices[0]));
        if (area < best_area) {
            best_area = area;
            best = tri;
        }
    }
    return best;
}

}  // namespace

bool TrajectoryTriangle::contains(const Vec2& p, double tol) const
{
    if (degenerate)
        return point_segment_distance(p, vertices[0], vertices[1]) <= tol;
    if (inside_triangle(p, vertices))
        return true;
    return std::min({point_segment_distance(p, vertices[0], vertices[1]),
                     point_segment_distance(p, vertices[1], vertices[2]),
                     point_segment_distance(p, vertices[2], vertices[0])}) <= tol;
}

TrajectoryTriangle bounding_triangle(const AgentState& start, double heading, double t_final, double bound,
                                     double drag)
{
    return bounding_triangle(ConstantControlPath{start, bound * heading_vector(heading), drag}, t_final);
}

TrajectoryTriangle bounding_triangle(const ConstantControlPath& path, double t_final)
{
    if (!(t_final >= 0.0))
        throw ValidationError("bounding_triangle: negative horizon");
    const Vec2 r0 = path.start.position;
    const Vec2 rf = path.position(t_final);
    const Vec2& v0 = path.start.velocity;
    const Vec2& u = path.control;
    if (t_final == 0.0)
        return segment_hull(r0, r0);

    const double v0n = v0.norm();
    const double un = u.norm();
    const double parallel_tol = 1e-12;
    if (un == 0.0 || v0n == 0.0)
        return segment_hull(r0, rf);

    const double sin_angle = cross(v0, u) / (v0n * un);
    const double cos_angle = v0.dot(u) / (v0n * un);
    if (std::abs(sin_angle) <= parallel_tol) {
        if (cos_angle > 0.0)
            return segment_hull(r0, rf);
        // Antiparallel: motion along one line, reversing where the velocity vanishes.
        const Vec2 dir = u / un;
        const double vs = v0.dot(dir);
        const double cap = un / path.drag;
        const double t_stop = -std::log(cap / (cap - vs)) / path.drag;
        std::vector<Vec2> pts{r0, rf};
        if (t_stop > 0.0 && t_stop < t_final)
            pts.push_back(path.position(t_stop));
        auto key = [&](const Vec2& p) { return (p - r0).dot(dir); };
        const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(),
                                                  [&](const Vec2& a, const Vec2& b) { return key(a) < key(b); });
        return segment_hull(*lo, *hi);
    }

    const Vec2 d0 = v0 / v0n;
    const Vec2 vf = path.velocity(t_final);
    const double vfn = vf.norm();
    const double turn = vfn > 0.0 ? std::acos(std::clamp(d0.dot(vf / vfn), -1.0, 1.0)) : std::numbers::pi;
    if (turn < std::numbers::pi / 2.0 * 1.99 && vfn > 0.0) {
        const Vec2 df = vf / vfn;
        // r0 + alpha d0 = rf - beta df
        Eigen::Matrix2d m;
        m.col(0) = d0;
        m.col(1) = df;
        const double det = m.determinant();
        if (std::abs(det) > 1e-9) {
            const Vec2 ab = m.inverse() * (rf - r0);
            if (ab.x() >= 0.0 && ab.y() >= 0.0) {
                TrajectoryTriangle tri{{r0, r0 + ab.x() * d0, rf}, false};
                bool ok = true;
                for (int k = 1; k < 32 && ok; ++k)
                    ok = tri.contains(path.position(t_final * k / 32.0), 1e-9);
                if (ok)
                    return tri;
            }
        }
    }
    return sampled_hull(path, t_final);
}

double triangle_distance(const TrajectoryTriangle& a, const TrajectoryTriangle& b)
{
    const Hull ha = as_hull(a);
    const Hull hb = as_hull(b);
    if (ha.n == 3)
        for (int k = 0; k < hb.n; ++k)
            if (inside_triangle(hb.v[k], ha.v))
                return 0.0;
    if (hb.n == 3)
        for (int k = 0; k < ha.n; ++k)
            if (inside_triangle(ha.v[k], hb.v))
                return 0.0;

    const int ea = ha.n == 3 ? 3 : 1;
    const int eb = hb.n == 3 ? 3 : 1;
    double best = std::numeric_limits<double>::infinity();
    for (int p = 0; p < ea; ++p)
        for (int q = 0; q < eb; ++q)
            best = std::min(best, segment_distance(ha.v[p], ha.v[(p + 1) % ha.n], hb.v[q], hb.v[(q + 1) % hb.n]));
    return best;
}

bool triangles_conflict(const TrajectoryTriangle& a, const TrajectoryTriangle& b, double separation)
{
    return triangle_distance(a, b) < separation;
}

std::optional<double> collision_time(const ConstantControlPath& a, const ConstantControlPath& b, double separation,
                                     double horizon, const CollisionScanOptions& opts)
{
    auto gap = [&](double t) { return (a.position(t) - b.position(t)).norm() - separation; };
    // d/dt of the squared separation
    auto slope = [&](double t) { return 2.0 * (a.position(t) - b.position(t)).dot(a.velocity(t) - b.velocity(t)); };
    auto first_crossing = [&](double lo, double hi) {
        while (hi - lo > opts.time_tolerance) {
            const double mid = 0.5 * (lo + hi);
            if (gap(mid) <= 0.0)
                hi = mid;
            else
                lo = mid;
        }
        return hi;
    };

    if (gap(0.0) <= 0.0)
        return 0.0;
    if (!(horizon > 0.0))
        return std::nullopt;

    const auto steps = static_cast<long>(std::ceil(horizon / opts.scan_step));
    double t0 = 0.0;
    double s0 = slope(0.0);
    for (long k = 1; k <= steps; ++k) {
        const double t1 = std::min(horizon, k * opts.scan_step);
        if (gap(t1) <= 0.0)
            return first_crossing(t0, t1);
        const double s1 = slope(t1);
        if (s0 < 0.0 && s1 > 0.0) {
            // Closest approach inside the cell.
            double lo = t0;
            double hi = t1;
            while (hi - lo > opts.time_tolerance) {
                const double mid = 0.5 * (lo + hi);
                if (slope(mid) < 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            if (gap(lo) <= 0.0)
                return first_crossing(t0, lo);
        }
        t0 = t1;
        s0 = s1;
    }
    return std::nullopt;
}

EngagementTable build_engagement_table(const std::vector<AgentState>& defenders,
                                       const std::vector<AgentState>& attackers, const WorldParams& world,
                                       const AgentParams& pd, const AgentParams& pa)
{
    EngagementTable table;
    table.num_defenders = defenders.size();
    table.num_attackers = attackers.size();
    table.plans.reserve(defenders.size() * attackers.size());
    for (const auto& d : defenders) {
        for (const auto& a : attackers) {
            const auto sol = solve_defender(d, a, world, pd, pa);
            table.plans.push_back({ConstantControlPath{d, sol.defender_control(pd), pd.drag}, sol.defender_time, sol});
        }
    }
    return table;
}

CollisionTable::CollisionTable(std::size_t num_defenders, std::size_t num_attackers)
    : nd_(num_defenders), na_(num_attackers), entries_(num_defenders * num_attackers * num_defenders * num_attackers)
{
}

void CollisionTable::set(std::size_t j, std::size_t i, std::size_t jp, std::size_t ip, std::optional<CollisionEntry> e)
{
    entries_[index(j, i, jp, ip)] = e;
}

std::size_t CollisionTable::count() const
{
    return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [](const auto& e) { return e.has_value(); }));
}

bool operator==(const CollisionEntry& a, const CollisionEntry& b) { return a.time == b.time && a.clamped == b.clamped; }

bool CollisionTable::operator==(const CollisionTable& o) const
{
    return nd_ == o.nd_ && na_ == o.na_ && entries_ == o.entries_;
}

CollisionTable all_pairs_collision_times(const EngagementTable& table, double separation, const ForecastOptions& opts,
                                         ForecastStats* stats)
{
    const std::size_t nd = table.num_defenders;
    const std::size_t na = table.num_attackers;
    CollisionTable out(nd, na);
    ForecastStats local;

    for (std::size_t j = 0; j < nd; ++j) {
        for (std::size_t jp = j + 1; jp < nd; ++jp) {
            for (std::size_t i = 0; i < na; ++i) {
                for (std::size_t ip = 0; ip < na; ++ip) {
                    if (i == ip)
                        continue;
                    ++local.candidate_pairs;
                    const auto& pa = table.at(j, i);
                    const auto& pb = table.at(jp, ip);
                    const double horizon = std::max(pa.intercept_time, pb.intercept_time);
                    if (opts.use_triangle_pruning) {
                        const auto ta = bounding_triangle(pa.path, horizon);
                        const auto tb = bounding_triangle(pb.path, horizon);
                        if (!triangles_conflict(ta, tb, separation))
                            continue;
                    }
                    ++local.collision_time_calls;
                    const auto t = collision_time(pa.path, pb.path, separation, horizon, opts.scan);
                    if (!t)
                        continue;
                    CollisionEntry entry{*t, false};
                    if (entry.time < opts.min_time) {
                        entry.time = opts.min_time;
                        entry.clamped = true;
                        ++local.clamped;
                    }
                    ++local.collisions;
                    out.set(j, i, jp, ip, entry);
                    out.set(jp, ip, j, i, entry);
                }
            }
        }
    }
    if (stats)
        *stats = local;
    return out;
}

}  // namespace idcais
