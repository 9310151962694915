#include "wavebench/field2d.hpp"

#include <algorithm>
#include <cmath>

namespace wavebench {

namespace {
constexpr double kTwoPi = 6.2831853071795864769;
constexpr double kSqrt2 = 1.4142135623730950488;

struct Twin {
    std::vector<double>* px;
    std::vector<double>* py;
    std::vector<double>* vx;
    std::vector<double>* vy;
    const std::vector<std::uint8_t>* mask;  // nullptr for the free twin
};

// One leapfrog substep of a twin. Damping is integrated semi-implicitly,
// which keeps the PML stable at large sigma.
void substep_twin(Twin t, SimState& s, const SimConfig& cfg, double t_now) {
    const int n = s.n;
    const double dx = cfg.dx();
    const double dt = substep_dt(cfg);
    const double c2 = cfg.sound_speed * cfg.sound_speed;
    const double inv2dx = 1.0 / (2.0 * dx);

    std::vector<double>& p = s.scratch;
    const std::vector<double>& px = *t.px;
    const std::vector<double>& py = *t.py;
    std::vector<double>& vx = *t.vx;
    std::vector<double>& vy = *t.vy;

    double maxabs = 0.0;
    for (int k = 0; k < n * n; ++k) {
        p[k] = px[k] + py[k];
        maxabs = std::max(maxabs, std::abs(p[k]));
    }
    if (!(maxabs <= cfg.blowup_bound))
        throw NumericalBlowup("pressure exceeded blowup bound (CFL violation?)");

    for (int iy = 0; iy < n; ++iy) {
        const double sy = s.sigma_y[iy];
        const double ay = (1.0 - 0.5 * sy * dt) / (1.0 + 0.5 * sy * dt);
        const double by = dt / (1.0 + 0.5 * sy * dt);
        const int row = iy * n;
        for (int ix = 0; ix < n; ++ix) {
            const double sx = s.sigma_x[ix];
            const double axc = (1.0 - 0.5 * sx * dt) / (1.0 + 0.5 * sx * dt);
            const double bxc = dt / (1.0 + 0.5 * sx * dt);
            const double pr = ix + 1 < n ? p[row + ix + 1] : 0.0;
            const double pl = ix > 0 ? p[row + ix - 1] : 0.0;
            const double pu = iy + 1 < n ? p[row + n + ix] : 0.0;
            const double pd = iy > 0 ? p[row - n + ix] : 0.0;
            vx[row + ix] = axc * vx[row + ix] - bxc * (pr - pl) * inv2dx;
            vy[row + ix] = ay * vy[row + ix] - by * (pu - pd) * inv2dx;
        }
    }

    if (t.mask) {
        const std::vector<std::uint8_t>& m = *t.mask;
        for (int k = 0; k < n * n; ++k) {
            if (m[k]) {
                vx[k] = 0.0;
                vy[k] = 0.0;
            }
        }
    }

    std::vector<double>& pxw = *t.px;
    std::vector<double>& pyw = *t.py;
    for (int iy = 0; iy < n; ++iy) {
        const double sy = s.sigma_y[iy];
        const double ay = (1.0 - 0.5 * sy * dt) / (1.0 + 0.5 * sy * dt);
        const double by = dt / (1.0 + 0.5 * sy * dt);
        const int row = iy * n;
        for (int ix = 0; ix < n; ++ix) {
            const double sx = s.sigma_x[ix];
            const double axc = (1.0 - 0.5 * sx * dt) / (1.0 + 0.5 * sx * dt);
            const double bxc = dt / (1.0 + 0.5 * sx * dt);
            const double vr = ix + 1 < n ? vx[row + ix + 1] : 0.0;
            const double vl = ix > 0 ? vx[row + ix - 1] : 0.0;
            const double vu = iy + 1 < n ? vy[row + n + ix] : 0.0;
            const double vd = iy > 0 ? vy[row - n + ix] : 0.0;
            pxw[row + ix] = axc * pxw[row + ix] - bxc * c2 * (vr - vl) * inv2dx;
            pyw[row + ix] = ay * pyw[row + ix] - by * c2 * (vu - vd) * inv2dx;
        }
    }

    // Tonal point source, midpoint-sampled, split evenly across px/py.
    const double dxw = cfg.dx();
    const int src_ix = std::clamp(
        static_cast<int>(std::floor((cfg.source_x + cfg.domain_half_width) / dxw)), 0, n - 1);
    const int src_iy = std::clamp(
        static_cast<int>(std::floor((cfg.source_y + cfg.domain_half_width) / dxw)), 0, n - 1);
    const double f = dt * cfg.source_amplitude *
                     std::sin(kTwoPi * cfg.source_frequency * (t_now + 0.5 * dt));
    pxw[src_iy * n + src_ix] += 0.5 * f;
    pyw[src_iy * n + src_ix] += 0.5 * f;
}

inline bool in_quadrant(const SimConfig& cfg, int ix, int iy) {
    return cfg.cell_center(ix) > 0.0 && cfg.cell_center(iy) > 0.0;
}

}  // namespace

double SimState::time(const SimConfig& cfg) const {
    return static_cast<double>(substep_count) * substep_dt(cfg);
}

double cfl_dt(const SimConfig& cfg) {
    return cfg.cfl_safety * cfg.dx() / (cfg.sound_speed * kSqrt2);
}

int substeps_per_action(const SimConfig& cfg) {
    return static_cast<int>(std::ceil(cfg.action_period / cfl_dt(cfg)));
}

double substep_dt(const SimConfig& cfg) {
    return cfg.action_period / substeps_per_action(cfg);
}

std::pair<std::vector<double>, std::vector<double>> build_pml(const SimConfig& cfg) {
    const int n = cfg.grid_n;
    const int w = cfg.pml_width;
    std::vector<double> sx(n, 0.0), sy(n, 0.0);
    for (int i = 0; i < n; ++i) {
        // Depth into the layer, measured so the outermost cell reaches
        // pml_strength and the first cell inside the interior is zero.
        double depth = 0.0;
        if (i < w) depth = static_cast<double>(w - i);
        else if (i >= n - w) depth = static_cast<double>(i - (n - w) + 1);
        const double u = depth / w;
        sx[i] = cfg.pml_strength * u * u * u;
    }
    sy = sx;
    return {std::move(sx), std::move(sy)};
}

SimState make_state(const SimConfig& cfg) {
    cfg.validate();
    SimState s;
    s.n = cfg.grid_n;
    const int nn = s.n * s.n;
    s.px_tot.assign(nn, 0.0);
    s.py_tot.assign(nn, 0.0);
    s.vx_tot.assign(nn, 0.0);
    s.vy_tot.assign(nn, 0.0);
    s.px_free.assign(nn, 0.0);
    s.py_free.assign(nn, 0.0);
    s.vx_free.assign(nn, 0.0);
    s.vy_free.assign(nn, 0.0);
    auto [sx, sy] = build_pml(cfg);
    s.sigma_x = std::move(sx);
    s.sigma_y = std::move(sy);
    s.mask.assign(nn, 0);
    s.scratch.assign(nn, 0.0);
    return s;
}

std::vector<std::uint8_t> rasterize_scatterers(const DesignState& d, const SimConfig& cfg) {
    const int n = cfg.grid_n;
    const double dx = cfg.dx();
    const double hw = cfg.domain_half_width;
    const double pml_edge = hw - cfg.pml_width * dx;
    std::vector<std::uint8_t> mask(n * n, 0);
    for (int i = 0; i < d.count(); ++i) {
        const double x = d.cx[i], y = d.cy[i], r = d.r[i];
        if (r <= 0.0) continue;
        if (x - r < -pml_edge || x + r > pml_edge || y - r < -pml_edge || y + r > pml_edge)
            throw ConstraintViolation("scatterer disk intersects the PML region");
        const int ix0 = std::max(0, static_cast<int>(std::floor((x - r + hw) / dx)) - 1);
        const int ix1 = std::min(n - 1, static_cast<int>(std::floor((x + r + hw) / dx)) + 1);
        const int iy0 = std::max(0, static_cast<int>(std::floor((y - r + hw) / dx)) - 1);
        const int iy1 = std::min(n - 1, static_cast<int>(std::floor((y + r + hw) / dx)) + 1);
        const double r2 = r * r;
        for (int iy = iy0; iy <= iy1; ++iy) {
            const double cy = cfg.cell_center(iy) - y;
            for (int ix = ix0; ix <= ix1; ++ix) {
                const double cx = cfg.cell_center(ix) - x;
                if (cx * cx + cy * cy <= r2) mask[iy * n + ix] = 1;
            }
        }
    }
    return mask;
}

void step(SimState& state, const SimConfig& cfg, int substeps) {
    const double dt = substep_dt(cfg);
    for (int k = 0; k < substeps; ++k) {
        const double t_now = static_cast<double>(state.substep_count) * dt;
        substep_twin({&state.px_tot, &state.py_tot, &state.vx_tot, &state.vy_tot, &state.mask},
                     state, cfg, t_now);
        substep_twin({&state.px_free, &state.py_free, &state.vx_free, &state.vy_free, nullptr},
                     state, cfg, t_now);
        ++state.substep_count;
    }
}

std::vector<double> scattered_field(const SimState& state, const SimConfig& cfg) {
    const int n = state.n;
    const int w = cfg.pml_width;
    const int m = cfg.interior_n();
    std::vector<double> out(static_cast<std::size_t>(m) * m);
    for (int iy = 0; iy < m; ++iy) {
        for (int ix = 0; ix < m; ++ix) {
            const int k = (iy + w) * n + (ix + w);
            out[iy * m + ix] = (state.px_tot[k] + state.py_tot[k]) -
                               (state.px_free[k] + state.py_free[k]);
        }
    }
    return out;
}

double field_energy(const std::vector<double>& field, const SimConfig& cfg, Region region) {
    const int m = cfg.interior_n();
    if (static_cast<int>(field.size()) != m * m)
        throw ShapeMismatch("field_energy expects an interior-sized field");
    const int w = cfg.pml_width;
    const double cell = cfg.dx() * cfg.dx();
    double e = 0.0;
    for (int iy = 0; iy < m; ++iy) {
        for (int ix = 0; ix < m; ++ix) {
            if (region == Region::UpperRightQuadrant && !in_quadrant(cfg, ix + w, iy + w))
                continue;
            const double f = field[iy * m + ix];
            e += f * f * cell;
        }
    }
    return e;
}

double scattered_energy(const SimState& state, const SimConfig& cfg, Region region) {
    const int n = state.n;
    const int w = cfg.pml_width;
    const double cell = cfg.dx() * cfg.dx();
    double e = 0.0;
    for (int iy = w; iy < n - w; ++iy) {
        for (int ix = w; ix < n - w; ++ix) {
            if (region == Region::UpperRightQuadrant && !in_quadrant(cfg, ix, iy)) continue;
            const int k = iy * n + ix;
            const double f = (state.px_tot[k] + state.py_tot[k]) -
                             (state.px_free[k] + state.py_free[k]);
            e += f * f * cell;
        }
    }
    return e;
}

SensorImage sensor_read(const SimState& state, const SimConfig& cfg) {
    const int n = state.n;
    const int w = cfg.pml_width;
    const int m = cfg.interior_n();
    const int d = cfg.sensor_n;
    SensorImage img;
    img.d1 = d;
    img.d2 = d;
    img.v.assign(static_cast<std::size_t>(d) * d, 0.0);

    // Integer overlap bookkeeping: cell i spans [i*d, (i+1)*d) and pixel a
    // spans [a*m, (a+1)*m) in units of 1/(m*d); weights are exact.
    std::vector<std::vector<std::pair<int, double>>> seg(d);
    for (int a = 0; a < d; ++a) {
        const long long lo = static_cast<long long>(a) * m;
        const long long hi = static_cast<long long>(a + 1) * m;
        const int i0 = static_cast<int>(lo / d);
        const int i1 = static_cast<int>((hi - 1) / d);
        for (int i = i0; i <= i1; ++i) {
            const long long clo = static_cast<long long>(i) * d;
            const long long chi = clo + d;
            const long long ov = std::min(hi, chi) - std::max(lo, clo);
            if (ov > 0) seg[a].push_back({i, static_cast<double>(ov)});
        }
    }
    const double norm = 1.0 / (static_cast<double>(m) * static_cast<double>(m));
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            double acc = 0.0;
            for (const auto& [iy, wy] : seg[a]) {
                double rowacc = 0.0;
                const int row = (iy + w) * n;
                for (const auto& [ix, wx] : seg[b]) {
                    const int k = row + ix + w;
                    rowacc += wx * (state.px_tot[k] + state.py_tot[k]);
                }
                acc += wy * rowacc;
            }
            img.v[a * d + b] = acc * norm;
        }
    }
    return img;
}

WindowResult run_window(SimState& state, const std::vector<DesignState>& traj,
                        const SimConfig& cfg, Region region) {
    const int substeps = substeps_per_action(cfg);
    if (static_cast<int>(traj.size()) != substeps + 1)
        throw ShapeMismatch("design trajectory must hold substeps+1 samples");
    WindowResult out;
    out.sigma.dt = substep_dt(cfg);
    out.sigma.label = to_string(region);
    out.sigma.values.reserve(substeps);
    for (int k = 0; k < substeps; ++k) {
        const bool same = k > 0 && traj[k].cx == traj[k - 1].cx && traj[k].cy == traj[k - 1].cy &&
                          traj[k].r == traj[k - 1].r;
        if (!same) state.mask = rasterize_scatterers(traj[k], cfg);
        step(state, cfg, 1);
        out.sigma.values.push_back(scattered_energy(state, cfg, region));
    }
    out.x_end = sensor_read(state, cfg);
    return out;
}

double twin_energy(const std::vector<double>& px, const std::vector<double>& py,
                   const std::vector<double>& vx, const std::vector<double>& vy,
                   const SimConfig& cfg, bool interior_only) {
    const int n = cfg.grid_n;
    const int w = interior_only ? cfg.pml_width : 0;
    const double c2 = cfg.sound_speed * cfg.sound_speed;
    const double cell = cfg.dx() * cfg.dx();
    double e = 0.0;
    for (int iy = w; iy < n - w; ++iy) {
        for (int ix = w; ix < n - w; ++ix) {
            const int k = iy * n + ix;
            const double p = px[k] + py[k];
            e += (p * p / c2 + vx[k] * vx[k] + vy[k] * vy[k]) * cell * 0.5;
        }
    }
    return e;
}

}  // namespace wavebench
