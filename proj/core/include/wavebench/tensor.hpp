#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "wavebench/common.hpp"

namespace wavebench {

// Dense row-major tensor of doubles, rank 0..3. Rank 0 is a scalar with one
// element. All training-side math is 64-bit.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> v;

    Tensor() = default;
    explicit Tensor(std::initializer_list<int> s) { reset(std::vector<int>(s)); }

    static Tensor zeros(const std::vector<int>& s) {
        Tensor t;
        t.reset(s);
        return t;
    }
    static Tensor scalar(double x) {
        Tensor t;
        t.shape = {};
        t.v = {x};
        return t;
    }
    static Tensor from(std::vector<double> data) {
        Tensor t;
        t.shape = {static_cast<int>(data.size())};
        t.v = std::move(data);
        return t;
    }

    void reset(const std::vector<int>& s) {
        shape = s;
        std::size_t n = 1;
        for (int d : s) {
            if (d <= 0) throw ShapeMismatch("non-positive tensor dimension");
            n *= static_cast<std::size_t>(d);
        }
        v.assign(n, 0.0);
    }

    std::size_t numel() const { return v.size(); }
    int rank() const { return static_cast<int>(shape.size()); }
    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
    bool same_shape(const Tensor& o) const { return shape == o.shape; }
    double scalar_value() const {
        if (numel() != 1) throw ShapeMismatch("expected a scalar tensor");
        return v[0];
    }
    void fill(double x) { std::fill(v.begin(), v.end(), x); }
};

// Numerically stable softplus and its derivative (the logistic function).
double softplus(double x);
double softplus_deriv(double x);

// y = W x + b,  W:[m,n], x:[n], b:[m]
void affine_fwd(const Tensor& W, const Tensor& x, const Tensor& b, Tensor& y);
void affine_bwd(const Tensor& W, const Tensor& x, const Tensor& gy, Tensor& gW, Tensor& gx,
                Tensor& gb);

// 3x3 same-padding convolution with stride; x:[C,H,W], k:[F,C,3,3], b:[F].
void conv2d_fwd(const Tensor& x, const Tensor& k, const Tensor& b, int stride, Tensor& y);
void conv2d_bwd(const Tensor& x, const Tensor& k, int stride, const Tensor& gy, Tensor& gx,
                Tensor& gk, Tensor& gb);

// width-3 same-padding 1D convolution, stride 1; x:[C,L], k:[F,C,3], b:[F].
void conv1d_fwd(const Tensor& x, const Tensor& k, const Tensor& b, Tensor& y);
void conv1d_bwd(const Tensor& x, const Tensor& k, const Tensor& gy, Tensor& gx, Tensor& gk,
                Tensor& gb);

// Non-overlapping window average pooling; x:[C,H,W], H and W divisible by win.
void avgpool2d_fwd(const Tensor& x, int win, Tensor& y);
void avgpool2d_bwd(const Tensor& x, int win, const Tensor& gy, Tensor& gx);

// Latent 1D wave substep. z = [u; w] is [2,G] with w the speed-normalized
// velocity (w = v/c0, which keeps both rows on comparable scales):
//   w' = B .* (w + dt*(c0*C^2 * lap(u) + s*sin(omega*t))) ./ (1 + dt*L)
//   u' = B .* (u + dt*c0*w')
// Equivalent to d2u/dt2 = (c0*C)^2 lap(u) - L du/dt + forcing. lap is the
// three-point Laplacian with zero ghost cells; B pins the two endpoint cells
// to zero (Dirichlet boundary).
struct LatentStepParams {
    double dt = 0.0;
    double dx = 0.0;
    double c0 = 0.0;
    double omega = 0.0;
    double t = 0.0;
};
void latent_step_fwd(const Tensor& z, const Tensor& C, const Tensor& L, const Tensor& s,
                     const LatentStepParams& p, Tensor& z_next);
void latent_step_bwd(const Tensor& z, const Tensor& C, const Tensor& L, const Tensor& s,
                     const LatentStepParams& p, const Tensor& z_next, const Tensor& gz_next,
                     Tensor& gz, Tensor& gC, Tensor& gL, Tensor& gs);

// Forward difference with a zero ghost cell at the right edge: d[i] =
// (u[i+1] - u[i]) / dx, u[G] := 0.
void diff1d_fwd(const Tensor& u, double dx, Tensor& d);
void diff1d_bwd(double dx, const Tensor& gd, Tensor& gu);

// x + a*y, evaluated as scale-then-add (the tape's op ordering).
Tensor axpy(const Tensor& x, const Tensor& y, double a);

// Classic fourth-order Runge-Kutta step. f(state, stage) evaluates the
// vector field; stage is 0 for t, 1 and 2 for t+dt/2, 3 for t+dt.
template <class F>
Tensor rk4_step(const Tensor& h, double dt, F&& f) {
    const Tensor k1 = f(h, 0);
    const Tensor k2 = f(axpy(h, k1, dt / 2.0), 1);
    const Tensor k3 = f(axpy(h, k2, dt / 2.0), 2);
    const Tensor k4 = f(axpy(h, k3, dt), 3);
    Tensor acc = axpy(axpy(k1, k2, 2.0), k3, 2.0);
    acc = axpy(acc, k4, 1.0);
    return axpy(h, acc, dt / 6.0);
}

}  // namespace wavebench
