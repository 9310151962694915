#include "wavebench/tensor.hpp"

#include <cmath>

namespace wavebench {

double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double softplus_deriv(double x) {
    if (x > 30.0) return 1.0;
    if (x < -30.0) return std::exp(x);
    return 1.0 / (1.0 + std::exp(-x));
}

void affine_fwd(const Tensor& W, const Tensor& x, const Tensor& b, Tensor& y) {
    if (W.rank() != 2) throw ShapeMismatch("affine: W must be rank 2");
    const int m = W.dim(0), n = W.dim(1);
    if (static_cast<int>(x.numel()) != n) throw ShapeMismatch("affine: x length mismatch");
    if (static_cast<int>(b.numel()) != m) throw ShapeMismatch("affine: b length mismatch");
    y.reset({m});
    for (int i = 0; i < m; ++i) {
        double acc = b.v[i];
        const double* wrow = &W.v[static_cast<std::size_t>(i) * n];
        for (int j = 0; j < n; ++j) acc += wrow[j] * x.v[j];
        y.v[i] = acc;
    }
}

void affine_bwd(const Tensor& W, const Tensor& x, const Tensor& gy, Tensor& gW, Tensor& gx,
                Tensor& gb) {
    const int m = W.dim(0), n = W.dim(1);
    for (int i = 0; i < m; ++i) {
        const double g = gy.v[i];
        gb.v[i] += g;
        double* gwrow = &gW.v[static_cast<std::size_t>(i) * n];
        const double* wrow = &W.v[static_cast<std::size_t>(i) * n];
        for (int j = 0; j < n; ++j) {
            gwrow[j] += g * x.v[j];
            gx.v[j] += g * wrow[j];
        }
    }
}

namespace {
inline int conv_out(int size, int stride) { return (size + 2 - 3) / stride + 1; }
}  // namespace

void conv2d_fwd(const Tensor& x, const Tensor& k, const Tensor& b, int stride, Tensor& y) {
    if (x.rank() != 3 || k.rank() != 4 || k.dim(2) != 3 || k.dim(3) != 3)
        throw ShapeMismatch("conv2d: expected x[C,H,W], k[F,C,3,3]");
    const int C = x.dim(0), H = x.dim(1), W = x.dim(2);
    const int F = k.dim(0);
    if (k.dim(1) != C) throw ShapeMismatch("conv2d: channel mismatch");
    const int Ho = conv_out(H, stride), Wo = conv_out(W, stride);
    y.reset({F, Ho, Wo});
    for (int f = 0; f < F; ++f) {
        for (int oy = 0; oy < Ho; ++oy) {
            for (int ox = 0; ox < Wo; ++ox) {
                double acc = b.v[f];
                const int iy0 = oy * stride - 1;
                const int ix0 = ox * stride - 1;
                for (int c = 0; c < C; ++c) {
                    const double* xp = &x.v[static_cast<std::size_t>(c) * H * W];
                    const double* kp = &k.v[(static_cast<std::size_t>(f) * C + c) * 9];
                    for (int dy = 0; dy < 3; ++dy) {
                        const int iy = iy0 + dy;
                        if (iy < 0 || iy >= H) continue;
                        for (int dxk = 0; dxk < 3; ++dxk) {
                            const int ix = ix0 + dxk;
                            if (ix < 0 || ix >= W) continue;
                            acc += kp[dy * 3 + dxk] * xp[iy * W + ix];
                        }
                    }
                }
                y.v[(static_cast<std::size_t>(f) * Ho + oy) * Wo + ox] = acc;
            }
        }
    }
}

void conv2d_bwd(const Tensor& x, const Tensor& k, int stride, const Tensor& gy, Tensor& gx,
                Tensor& gk, Tensor& gb) {
    const int C = x.dim(0), H = x.dim(1), W = x.dim(2);
    const int F = k.dim(0);
    const int Ho = gy.dim(1), Wo = gy.dim(2);
    for (int f = 0; f < F; ++f) {
        for (int oy = 0; oy < Ho; ++oy) {
            for (int ox = 0; ox < Wo; ++ox) {
                const double g = gy.v[(static_cast<std::size_t>(f) * Ho + oy) * Wo + ox];
                if (g == 0.0) continue;
                gb.v[f] += g;
                const int iy0 = oy * stride - 1;
                const int ix0 = ox * stride - 1;
                for (int c = 0; c < C; ++c) {
                    const double* xp = &x.v[static_cast<std::size_t>(c) * H * W];
                    double* gxp = &gx.v[static_cast<std::size_t>(c) * H * W];
                    const double* kp = &k.v[(static_cast<std::size_t>(f) * C + c) * 9];
                    double* gkp = &gk.v[(static_cast<std::size_t>(f) * C + c) * 9];
                    for (int dy = 0; dy < 3; ++dy) {
                        const int iy = iy0 + dy;
                        if (iy < 0 || iy >= H) continue;
                        for (int dxk = 0; dxk < 3; ++dxk) {
                            const int ix = ix0 + dxk;
                            if (ix < 0 || ix >= W) continue;
                            gkp[dy * 3 + dxk] += g * xp[iy * W + ix];
                            gxp[iy * W + ix] += g * kp[dy * 3 + dxk];
                        }
                    }
                }
            }
        }
    }
}

void conv1d_fwd(const Tensor& x, const Tensor& k, const Tensor& b, Tensor& y) {
    if (x.rank() != 2 || k.rank() != 3 || k.dim(2) != 3)
        throw ShapeMismatch("conv1d: expected x[C,L], k[F,C,3]");
    const int C = x.dim(0), L = x.dim(1), F = k.dim(0);
    if (k.dim(1) != C) throw ShapeMismatch("conv1d: channel mismatch");
    y.reset({F, L});
    for (int f = 0; f < F; ++f) {
        for (int i = 0; i < L; ++i) {
            double acc = b.v[f];
            for (int c = 0; c < C; ++c) {
                const double* xp = &x.v[static_cast<std::size_t>(c) * L];
                const double* kp = &k.v[(static_cast<std::size_t>(f) * C + c) * 3];
                if (i > 0) acc += kp[0] * xp[i - 1];
                acc += kp[1] * xp[i];
                if (i + 1 < L) acc += kp[2] * xp[i + 1];
            }
            y.v[static_cast<std::size_t>(f) * L + i] = acc;
        }
    }
}

void conv1d_bwd(const Tensor& x, const Tensor& k, const Tensor& gy, Tensor& gx, Tensor& gk,
                Tensor& gb) {
    const int C = x.dim(0), L = x.dim(1), F = k.dim(0);
    for (int f = 0; f < F; ++f) {
        for (int i = 0; i < L; ++i) {
            const double g = gy.v[static_cast<std::size_t>(f) * L + i];
            if (g == 0.0) continue;
            gb.v[f] += g;
            for (int c = 0; c < C; ++c) {
                const double* xp = &x.v[static_cast<std::size_t>(c) * L];
                double* gxp = &gx.v[static_cast<std::size_t>(c) * L];
                const double* kp = &k.v[(static_cast<std::size_t>(f) * C + c) * 3];
                double* gkp = &gk.v[(static_cast<std::size_t>(f) * C + c) * 3];
                if (i > 0) {
                    gkp[0] += g * xp[i - 1];
                    gxp[i - 1] += g * kp[0];
                }
                gkp[1] += g * xp[i];
                gxp[i] += g * kp[1];
                if (i + 1 < L) {
                    gkp[2] += g * xp[i + 1];
                    gxp[i + 1] += g * kp[2];
                }
            }
        }
    }
}

void avgpool2d_fwd(const Tensor& x, int win, Tensor& y) {
    if (x.rank() != 3) throw ShapeMismatch("avgpool2d: expected x[C,H,W]");
    const int C = x.dim(0), H = x.dim(1), W = x.dim(2);
    if (H % win != 0 || W % win != 0) throw ShapeMismatch("avgpool2d: size not divisible by window");
    const int Ho = H / win, Wo = W / win;
    const double inv = 1.0 / (win * win);
    y.reset({C, Ho, Wo});
    for (int c = 0; c < C; ++c) {
        for (int oy = 0; oy < Ho; ++oy) {
            for (int ox = 0; ox < Wo; ++ox) {
                double acc = 0.0;
                for (int dy = 0; dy < win; ++dy)
                    for (int dxk = 0; dxk < win; ++dxk)
                        acc += x.v[(static_cast<std::size_t>(c) * H + oy * win + dy) * W + ox * win + dxk];
                y.v[(static_cast<std::size_t>(c) * Ho + oy) * Wo + ox] = acc * inv;
            }
        }
    }
}

void avgpool2d_bwd(const Tensor& x, int win, const Tensor& gy, Tensor& gx) {
    const int C = x.dim(0), H = x.dim(1), W = x.dim(2);
    const int Ho = H / win, Wo = W / win;
    const double inv = 1.0 / (win * win);
    for (int c = 0; c < C; ++c) {
        for (int oy = 0; oy < Ho; ++oy) {
            for (int ox = 0; ox < Wo; ++ox) {
                const double g = gy.v[(static_cast<std::size_t>(c) * Ho + oy) * Wo + ox] * inv;
                for (int dy = 0; dy < win; ++dy)
                    for (int dxk = 0; dxk < win; ++dxk)
                        gx.v[(static_cast<std::size_t>(c) * H + oy * win + dy) * W + ox * win + dxk] += g;
            }
        }
    }
}

void latent_step_fwd(const Tensor& z, const Tensor& C, const Tensor& L, const Tensor& s,
                     const LatentStepParams& p, Tensor& z_next) {
    if (z.rank() != 2 || z.dim(0) != 2) throw ShapeMismatch("latent_step: z must be [2,G]");
    const int G = z.dim(1);
    if (static_cast<int>(C.numel()) != G || static_cast<int>(L.numel()) != G ||
        static_cast<int>(s.numel()) != G)
        throw ShapeMismatch("latent_step: field length mismatch");
    z_next.reset({2, G});
    const double* u = z.v.data();
    const double* w = z.v.data() + G;
    double* un = z_next.v.data();
    double* wn = z_next.v.data() + G;
    const double inv_dx2 = 1.0 / (p.dx * p.dx);
    const double force = std::sin(p.omega * p.t);
    for (int i = 1; i + 1 < G; ++i) {
        const double lap = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2;
        const double a = p.c0 * C.v[i] * C.v[i];
        const double ww = (w[i] + p.dt * (a * lap + s.v[i] * force)) / (1.0 + p.dt * L.v[i]);
        wn[i] = ww;
        un[i] = u[i] + p.dt * p.c0 * ww;
    }
    un[0] = 0.0;
    un[G - 1] = 0.0;
    wn[0] = 0.0;
    wn[G - 1] = 0.0;
}

void latent_step_bwd(const Tensor& z, const Tensor& C, const Tensor& L, const Tensor& s,
                     const LatentStepParams& p, const Tensor& z_next, const Tensor& gz_next,
                     Tensor& gz, Tensor& gC, Tensor& gL, Tensor& gs) {
    const int G = z.dim(1);
    const double* u = z.v.data();
    const double* wn = z_next.v.data() + G;
    const double* gun = gz_next.v.data();
    const double* gwn = gz_next.v.data() + G;
    double* gu = gz.v.data();
    double* gw = gz.v.data() + G;
    const double inv_dx2 = 1.0 / (p.dx * p.dx);
    const double force = std::sin(p.omega * p.t);
    for (int i = 1; i + 1 < G; ++i) {
        // u'[i] = u[i] + dt*c0*w'[i]; w'[i] = (w[i] + dt*(a*lap + s*f)) / D
        const double D = 1.0 + p.dt * L.v[i];
        const double gw_total = gwn[i] + p.dt * p.c0 * gun[i];
        gu[i] += gun[i];
        const double gpre = gw_total / D;  // adjoint of (w + dt*(a*lap + s*f))
        gw[i] += gpre;
        const double a = p.c0 * C.v[i] * C.v[i];
        const double lap = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2;
        const double glap = gpre * p.dt * a;
        gu[i - 1] += glap * inv_dx2;
        gu[i] += -2.0 * glap * inv_dx2;
        gu[i + 1] += glap * inv_dx2;
        gC.v[i] += gpre * p.dt * lap * 2.0 * p.c0 * C.v[i];
        gs.v[i] += gpre * p.dt * force;
        gL.v[i] += -p.dt * wn[i] * gw_total / D;
    }
}

void diff1d_fwd(const Tensor& u, double dx, Tensor& d) {
    const int G = static_cast<int>(u.numel());
    d.reset({G});
    const double inv = 1.0 / dx;
    for (int i = 0; i + 1 < G; ++i) d.v[i] = (u.v[i + 1] - u.v[i]) * inv;
    d.v[G - 1] = (0.0 - u.v[G - 1]) * inv;
}

Tensor axpy(const Tensor& x, const Tensor& y, double a) {
    if (!x.same_shape(y)) throw ShapeMismatch("axpy: shape mismatch");
    Tensor s = y;
    for (auto& t : s.v) t *= a;
    Tensor out = x;
    for (std::size_t i = 0; i < out.numel(); ++i) out.v[i] += s.v[i];
    return out;
}

void diff1d_bwd(double dx, const Tensor& gd, Tensor& gu) {
    const int G = static_cast<int>(gd.numel());
    const double inv = 1.0 / dx;
    for (int i = 0; i + 1 < G; ++i) {
        gu.v[i + 1] += gd.v[i] * inv;
        gu.v[i] -= gd.v[i] * inv;
    }
    gu.v[G - 1] -= gd.v[G - 1] * inv;
}

}  // namespace wavebench
