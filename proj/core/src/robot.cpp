#include "wavebench/robot.hpp"

#include <algorithm>
#include <cmath>

namespace wavebench {

namespace {
constexpr double kPi = 3.14159265358979323846;
// Pairs separate to need*(1+kSepMargin) so a reprojection sees them as
// feasible and returns its input unchanged (exact idempotence).
constexpr double kSepMargin = 1e-6;
constexpr double kFeasTol = 1e-9;
constexpr int kMaxSweeps = 16;
}  // namespace

int ActuationSpace::action_dim() const {
    switch (mode) {
        case ActuationMode::Radii: return scatterers;
        case ActuationMode::Position: return 2 * scatterers;
        default: return 3 * scatterers;
    }
}

double ActuationSpace::bound_for(int component) const {
    if (mode == ActuationMode::Radii) return radius_bound;
    if (mode == ActuationMode::Position) return position_bound;
    return component < 2 * scatterers ? position_bound : radius_bound;
}

ActuationSpace actuation_space(const RobotConfig& rc) {
    return ActuationSpace{rc.mode, rc.scatterer_count, rc.position_rate_bound, rc.radius_rate_bound};
}

DesignRegion design_region(const SimConfig& sim, const RobotConfig& rc) {
    const double interior = sim.domain_half_width - sim.pml_width * sim.dx();
    const double half = interior - rc.design_margin;
    if (half <= rc.r_max) throw ConfigError("design region too small for r_max");
    return DesignRegion{-half, half};
}

std::vector<double> DesignState::flat() const {
    std::vector<double> v;
    v.reserve(3 * r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        v.push_back(cx[i]);
        v.push_back(cy[i]);
    }
    v.insert(v.end(), r.begin(), r.end());
    return v;
}

DesignState DesignState::from_flat(const std::vector<double>& v, const ActuationSpace& space) {
    const int m = space.scatterers;
    if (static_cast<int>(v.size()) != 3 * m) throw ShapeMismatch("design vector length != 3M");
    DesignState d;
    d.space = space;
    d.cx.resize(m);
    d.cy.resize(m);
    d.r.resize(m);
    for (int i = 0; i < m; ++i) {
        d.cx[i] = v[2 * i];
        d.cy[i] = v[2 * i + 1];
        d.r[i] = v[2 * m + i];
    }
    return d;
}

bool is_feasible(const DesignState& d, const DesignRegion& region, const RobotConfig& rc) {
    const int m = d.count();
    for (int i = 0; i < m; ++i) {
        if (d.r[i] < rc.r_min - kFeasTol || d.r[i] > rc.r_max + kFeasTol) return false;
        if (d.cx[i] - d.r[i] < region.lo - kFeasTol || d.cx[i] + d.r[i] > region.hi + kFeasTol)
            return false;
        if (d.cy[i] - d.r[i] < region.lo - kFeasTol || d.cy[i] + d.r[i] > region.hi + kFeasTol)
            return false;
    }
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const double need = d.r[i] + d.r[j] + rc.gap;
            const double dist = std::hypot(d.cx[i] - d.cx[j], d.cy[i] - d.cy[j]);
            if (dist < need * (1.0 - kFeasTol)) return false;
        }
    }
    return true;
}

namespace {

// Largest translation of disk `i` along the unit direction (dx, dy) that
// keeps it inside the region.
double room_along(const DesignState& d, const DesignRegion& region, int i, double dx, double dy) {
    double lim = std::numeric_limits<double>::infinity();
    const double lo = region.lo + d.r[i], hi = region.hi - d.r[i];
    if (dx > 1e-12) lim = std::min(lim, (hi - d.cx[i]) / dx);
    if (dx < -1e-12) lim = std::min(lim, (lo - d.cx[i]) / dx);
    if (dy > 1e-12) lim = std::min(lim, (hi - d.cy[i]) / dy);
    if (dy < -1e-12) lim = std::min(lim, (lo - d.cy[i]) / dy);
    return std::max(0.0, lim);
}

}  // namespace

DesignState project(DesignState d, const DesignRegion& region, const RobotConfig& rc) {
    const int m = d.count();
    const bool centers_fixed = d.space.mode == ActuationMode::Radii;

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool changed = false;

        for (int i = 0; i < m; ++i) {
            if (d.r[i] < rc.r_min) { d.r[i] = rc.r_min; changed = true; }
            if (d.r[i] > rc.r_max) { d.r[i] = rc.r_max; changed = true; }
            if (!centers_fixed) {
                const double lo = region.lo + d.r[i], hi = region.hi - d.r[i];
                if (d.cx[i] < lo) { d.cx[i] = lo; changed = true; }
                if (d.cx[i] > hi) { d.cx[i] = hi; changed = true; }
                if (d.cy[i] < lo) { d.cy[i] = lo; changed = true; }
                if (d.cy[i] > hi) { d.cy[i] = hi; changed = true; }
            }
        }

        for (int i = 0; i < m; ++i) {
            for (int j = i + 1; j < m; ++j) {
                const double need = d.r[i] + d.r[j] + rc.gap;
                const double ddx = d.cx[j] - d.cx[i];
                const double ddy = d.cy[j] - d.cy[i];
                const double dist = std::hypot(ddx, ddy);
                if (dist >= need * (1.0 - kFeasTol)) continue;
                changed = true;
                if (centers_fixed) {
                    // Ring mode: shrink the pair's radii symmetrically.
                    const double excess = (need - dist) / 2.0;
                    d.r[i] = std::max(rc.r_min, d.r[i] - excess);
                    d.r[j] = std::max(rc.r_min, d.r[j] - excess);
                    continue;
                }
                const double target = need * (1.0 + kSepMargin);
                double ux, uy;
                if (dist > 1e-12) {
                    ux = ddx / dist;
                    uy = ddy / dist;
                } else {
                    ux = 1.0;  // coincident centers: tie-break along +x
                    uy = 0.0;
                }
                // Wall-aware radial push: each disk takes what fits, the
                // partner absorbs the slack.
                const double push = target - dist;
                const double cap_i = room_along(d, region, i, -ux, -uy);
                const double cap_j = room_along(d, region, j, ux, uy);
                double pj = std::min(push / 2.0, cap_j);
                double pi = std::min(push - pj, cap_i);
                pj = std::min(push - pi, cap_j);
                d.cx[i] -= ux * pi;
                d.cy[i] -= uy * pi;
                d.cx[j] += ux * pj;
                d.cy[j] += uy * pj;
                const double rem_radial = dist + pi + pj;
                if (rem_radial < target * (1.0 - kFeasTol)) {
                    // Both disks wall-limited along the center line (corner
                    // pile-up): slide tangentially until the distance closes.
                    const double tneed =
                        std::sqrt(std::max(0.0, target * target - rem_radial * rem_radial));
                    double tx = -uy, ty = ux;
                    if (room_along(d, region, j, tx, ty) < tneed) {
                        tx = -tx;
                        ty = -ty;
                    }
                    const double tj = std::min(tneed, room_along(d, region, j, tx, ty));
                    d.cx[j] += tx * tj;
                    d.cy[j] += ty * tj;
                    const double ti = std::min(tneed - tj, room_along(d, region, i, -tx, -ty));
                    d.cx[i] -= tx * ti;
                    d.cy[i] -= ty * ti;
                }
            }
        }

        if (!changed) {
            if (!is_feasible(d, region, rc)) break;
            return d;
        }
    }
    if (is_feasible(d, region, rc)) return d;
    throw ProjectionFailure("design projection did not converge within sweep limit");
}

std::vector<DesignState> integrate_design(const DesignState& d0, const ActionSpec& a,
                                          double interval, int substeps,
                                          const DesignRegion& region, const RobotConfig& rc) {
    const std::vector<double> rates = action_to_design_rates(a, d0.space);
    const int m = d0.count();
    std::vector<DesignState> traj;
    traj.reserve(substeps + 1);
    const double dt = interval / substeps;
    for (int k = 0; k <= substeps; ++k) {
        const double t = k * dt;
        DesignState d = d0;
        for (int i = 0; i < m; ++i) {
            d.cx[i] += rates[2 * i] * t;
            d.cy[i] += rates[2 * i + 1] * t;
            d.r[i] += rates[2 * m + i] * t;
        }
        traj.push_back(project(std::move(d), region, rc));
    }
    return traj;
}

DesignState ring_layout(int scatterers, double ring_radius, double r_init,
                        const ActuationSpace& space) {
    if (scatterers < 1) throw ConfigError("ring_layout needs at least one scatterer");
    DesignState d;
    d.space = space;
    d.space.scatterers = scatterers;
    d.cx.resize(scatterers);
    d.cy.resize(scatterers);
    d.r.assign(scatterers, r_init);
    for (int i = 0; i < scatterers; ++i) {
        const double a = 2.0 * kPi * i / scatterers;
        d.cx[i] = ring_radius * std::cos(a);
        d.cy[i] = ring_radius * std::sin(a);
    }
    if (scatterers > 1) {
        const double chord = 2.0 * ring_radius * std::sin(kPi / scatterers);
        if (chord < 2.0 * r_init)
            throw ConstraintViolation("ring layout: adjacent scatterers overlap");
    }
    return d;
}

DesignState initial_design(const Scenario& sc, Rng& rng) {
    const ActuationSpace space = actuation_space(sc.robot);
    if (sc.robot.mode == ActuationMode::Radii)
        return ring_layout(sc.robot.scatterer_count, sc.robot.ring_radius, sc.robot.r_init, space);

    const DesignRegion region = design_region(sc.sim, sc.robot);
    const int m = sc.robot.scatterer_count;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        DesignState d;
        d.space = space;
        d.cx.resize(m);
        d.cy.resize(m);
        d.r.assign(m, sc.robot.r_init);
        for (int i = 0; i < m; ++i) {
            d.cx[i] = rng.uniform(region.lo + sc.robot.r_init, region.hi - sc.robot.r_init);
            d.cy[i] = rng.uniform(region.lo + sc.robot.r_init, region.hi - sc.robot.r_init);
        }
        if (is_feasible(d, region, sc.robot)) return d;
    }
    throw ConstraintViolation("could not sample a feasible initial design");
}

ActionSpec random_action(const ActuationSpace& space, Rng& rng) {
    ActionSpec a;
    a.rates.resize(space.action_dim());
    for (int i = 0; i < space.action_dim(); ++i) {
        const double b = space.bound_for(i);
        a.rates[i] = rng.uniform(-b, b);
    }
    return a;
}

ActionSpec zero_action(const ActuationSpace& space) {
    return ActionSpec{std::vector<double>(space.action_dim(), 0.0)};
}

ActionSpec clamp_action(ActionSpec a, const ActuationSpace& space) {
    if (static_cast<int>(a.rates.size()) != space.action_dim())
        throw ShapeMismatch("action dimension mismatch");
    for (int i = 0; i < space.action_dim(); ++i) {
        const double b = space.bound_for(i);
        a.rates[i] = std::clamp(a.rates[i], -b, b);
    }
    return a;
}

std::vector<double> action_to_design_rates(const ActionSpec& a, const ActuationSpace& space) {
    if (static_cast<int>(a.rates.size()) != space.action_dim())
        throw ShapeMismatch("action dimension mismatch");
    const int m = space.scatterers;
    std::vector<double> rates(3 * m, 0.0);
    switch (space.mode) {
        case ActuationMode::Radii:
            for (int i = 0; i < m; ++i) rates[2 * m + i] = a.rates[i];
            break;
        case ActuationMode::Position:
            for (int i = 0; i < 2 * m; ++i) rates[i] = a.rates[i];
            break;
        case ActuationMode::Full:
            for (int i = 0; i < 3 * m; ++i) rates[i] = a.rates[i];
            break;
    }
    return rates;
}

ActionSpec action_from_design_rates(const std::vector<double>& rates, const ActuationSpace& space) {
    const int m = space.scatterers;
    if (static_cast<int>(rates.size()) != 3 * m) throw ShapeMismatch("rate vector length != 3M");
    ActionSpec a;
    switch (space.mode) {
        case ActuationMode::Radii:
            a.rates.assign(rates.begin() + 2 * m, rates.end());
            break;
        case ActuationMode::Position:
            a.rates.assign(rates.begin(), rates.begin() + 2 * m);
            break;
        case ActuationMode::Full:
            a.rates = rates;
            break;
    }
    return a;
}

}  // namespace wavebench
