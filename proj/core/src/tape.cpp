#include "wavebench/tape.hpp"

#include <cmath>

namespace wavebench {

int Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

int Tape::check(int id) const {
    if (id < 0 || id >= static_cast<int>(nodes_.size()))
        throw GraphCycle("node id out of range (inputs must precede consumers)");
    return id;
}

int Tape::leaf(Tensor value) {
    Node n;
    n.op = Op::Leaf;
    n.val = std::move(value);
    return push(std::move(n));
}

int Tape::param(ParamStore& ps, const std::string& name) {
    ParamBlock& b = ps.at(name);
    Node n;
    n.op = Op::Leaf;
    n.val = b.value;
    n.param = &b;
    return push(std::move(n));
}

int Tape::add(int x, int y) {
    const Tensor& a = value(x);
    const Tensor& b = value(y);
    if (!a.same_shape(b)) throw ShapeMismatch("add: shape mismatch");
    Node n;
    n.op = Op::Add;
    n.in[0] = x;
    n.in[1] = y;
    n.val = a;
    for (std::size_t i = 0; i < n.val.numel(); ++i) n.val.v[i] += b.v[i];
    return push(std::move(n));
}

int Tape::sub(int x, int y) {
    const Tensor& a = value(x);
    const Tensor& b = value(y);
    if (!a.same_shape(b)) throw ShapeMismatch("sub: shape mismatch");
    Node n;
    n.op = Op::Sub;
    n.in[0] = x;
    n.in[1] = y;
    n.val = a;
    for (std::size_t i = 0; i < n.val.numel(); ++i) n.val.v[i] -= b.v[i];
    return push(std::move(n));
}

int Tape::mul(int x, int y) {
    const Tensor& a = value(x);
    const Tensor& b = value(y);
    if (!a.same_shape(b)) throw ShapeMismatch("mul: shape mismatch");
    Node n;
    n.op = Op::Mul;
    n.in[0] = x;
    n.in[1] = y;
    n.val = a;
    for (std::size_t i = 0; i < n.val.numel(); ++i) n.val.v[i] *= b.v[i];
    return push(std::move(n));
}

int Tape::scale(int x, double a) {
    Node n;
    n.op = Op::Scale;
    n.in[0] = x;
    n.a = a;
    n.val = value(x);
    for (auto& t : n.val.v) t *= a;
    return push(std::move(n));
}

int Tape::offset(int x, double a) {
    Node n;
    n.op = Op::Offset;
    n.in[0] = x;
    n.a = a;
    n.val = value(x);
    for (auto& t : n.val.v) t += a;
    return push(std::move(n));
}

int Tape::tanh_(int x) {
    Node n;
    n.op = Op::Tanh;
    n.in[0] = x;
    n.val = value(x);
    for (auto& t : n.val.v) t = std::tanh(t);
    return push(std::move(n));
}

int Tape::softplus_(int x) {
    Node n;
    n.op = Op::Softplus;
    n.in[0] = x;
    n.val = value(x);
    for (auto& t : n.val.v) t = softplus(t);
    return push(std::move(n));
}

int Tape::square_(int x) {
    Node n;
    n.op = Op::Square;
    n.in[0] = x;
    n.val = value(x);
    for (auto& t : n.val.v) t *= t;
    return push(std::move(n));
}

int Tape::affine(int W, int x, int b) {
    Node n;
    n.op = Op::Affine;
    n.in[0] = W;
    n.in[1] = x;
    n.in[2] = b;
    affine_fwd(value(W), value(x), value(b), n.val);
    return push(std::move(n));
}

int Tape::conv2d(int x, int k, int b, int stride) {
    Node n;
    n.op = Op::Conv2d;
    n.in[0] = x;
    n.in[1] = k;
    n.in[2] = b;
    n.ia = stride;
    conv2d_fwd(value(x), value(k), value(b), stride, n.val);
    return push(std::move(n));
}

int Tape::conv1d(int x, int k, int b) {
    Node n;
    n.op = Op::Conv1d;
    n.in[0] = x;
    n.in[1] = k;
    n.in[2] = b;
    conv1d_fwd(value(x), value(k), value(b), n.val);
    return push(std::move(n));
}

int Tape::avgpool2d(int x, int win) {
    Node n;
    n.op = Op::AvgPool2d;
    n.in[0] = x;
    n.ia = win;
    avgpool2d_fwd(value(x), win, n.val);
    return push(std::move(n));
}

int Tape::concat2(int x, int y) {
    const Tensor& a = value(x);
    const Tensor& b = value(y);
    if (a.rank() != 1 || !a.same_shape(b)) throw ShapeMismatch("concat2: expects two equal vectors");
    Node n;
    n.op = Op::Concat2;
    n.in[0] = x;
    n.in[1] = y;
    n.val.reset({2, a.dim(0)});
    std::copy(a.v.begin(), a.v.end(), n.val.v.begin());
    std::copy(b.v.begin(), b.v.end(), n.val.v.begin() + a.dim(0));
    return push(std::move(n));
}

int Tape::concatv(int x, int y) {
    const Tensor& a = value(x);
    const Tensor& b = value(y);
    if (a.rank() != 1 || b.rank() != 1) throw ShapeMismatch("concatv: expects two vectors");
    Node n;
    n.op = Op::ConcatV;
    n.in[0] = x;
    n.in[1] = y;
    n.val.reset({a.dim(0) + b.dim(0)});
    std::copy(a.v.begin(), a.v.end(), n.val.v.begin());
    std::copy(b.v.begin(), b.v.end(), n.val.v.begin() + a.dim(0));
    return push(std::move(n));
}

int Tape::slice_row(int z, int row) {
    const Tensor& a = value(z);
    if (a.rank() != 2) throw ShapeMismatch("slice_row: expects a rank-2 tensor");
    if (row < 0 || row >= a.dim(0)) throw ShapeMismatch("slice_row: row out of range");
    Node n;
    n.op = Op::SliceRow;
    n.in[0] = z;
    n.ia = row;
    const int g = a.dim(1);
    n.val.reset({g});
    std::copy(a.v.begin() + static_cast<std::size_t>(row) * g,
              a.v.begin() + static_cast<std::size_t>(row + 1) * g, n.val.v.begin());
    return push(std::move(n));
}

int Tape::sum(int x) {
    Node n;
    n.op = Op::Sum;
    n.in[0] = x;
    double acc = 0.0;
    for (double t : value(x).v) acc += t;
    n.val = Tensor::scalar(acc);
    return push(std::move(n));
}

int Tape::dot(int x, int y) {
    const Tensor& a = value(x);
    const Tensor& b = value(y);
    if (!a.same_shape(b)) throw ShapeMismatch("dot: shape mismatch");
    Node n;
    n.op = Op::Dot;
    n.in[0] = x;
    n.in[1] = y;
    double acc = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) acc += a.v[i] * b.v[i];
    n.val = Tensor::scalar(acc);
    return push(std::move(n));
}

int Tape::lerp(int x, int y, double w) {
    const Tensor& a = value(x);
    const Tensor& b = value(y);
    if (!a.same_shape(b)) throw ShapeMismatch("lerp: shape mismatch");
    Node n;
    n.op = Op::Lerp;
    n.in[0] = x;
    n.in[1] = y;
    n.a = w;
    n.val = a;
    for (std::size_t i = 0; i < n.val.numel(); ++i) n.val.v[i] += w * (b.v[i] - a.v[i]);
    return push(std::move(n));
}

int Tape::diff1d(int u, double dx) {
    Node n;
    n.op = Op::Diff1d;
    n.in[0] = u;
    n.a = dx;
    diff1d_fwd(value(u), dx, n.val);
    return push(std::move(n));
}

int Tape::latent_step(int z, int C, int L, int s, const LatentStepParams& p) {
    Node n;
    n.op = Op::LatentStep;
    n.in[0] = z;
    n.in[1] = C;
    n.in[2] = s;  // L is tracked via ia? no -- see below
    n.step = p;
    // Three input slots are not enough; stash L in ia as a node id.
    n.ia = L;
    check(L);
    latent_step_fwd(value(z), value(C), value(L), value(s), p, n.val);
    return push(std::move(n));
}

void Tape::backward(int root) {
    check(root);
    if (nodes_[root].val.numel() != 1)
        throw ShapeMismatch("backward root must be a scalar node");
    for (auto& n : nodes_) {
        if (n.adj.numel() != n.val.numel() || !n.adj.same_shape(n.val)) {
            n.adj = Tensor::zeros(n.val.shape);
        } else {
            n.adj.fill(0.0);
        }
    }
    nodes_[root].adj.v[0] = 1.0;

    for (int id = root; id >= 0; --id) {
        Node& n = nodes_[id];
        bool all_zero = true;
        for (double g : n.adj.v) {
            if (g != 0.0) {
                all_zero = false;
                break;
            }
        }
        if (all_zero) continue;
        switch (n.op) {
            case Op::Leaf:
                break;
            case Op::Add: {
                Tensor& gx = nodes_[n.in[0]].adj;
                Tensor& gy = nodes_[n.in[1]].adj;
                for (std::size_t i = 0; i < n.adj.numel(); ++i) {
                    gx.v[i] += n.adj.v[i];
                    gy.v[i] += n.adj.v[i];
                }
                break;
            }
            case Op::Sub: {
                Tensor& gx = nodes_[n.in[0]].adj;
                Tensor& gy = nodes_[n.in[1]].adj;
                for (std::size_t i = 0; i < n.adj.numel(); ++i) {
                    gx.v[i] += n.adj.v[i];
                    gy.v[i] -= n.adj.v[i];
                }
                break;
            }
            case Op::Mul: {
                const Tensor& x = nodes_[n.in[0]].val;
                const Tensor& y = nodes_[n.in[1]].val;
                Tensor& gx = nodes_[n.in[0]].adj;
                Tensor& gy = nodes_[n.in[1]].adj;
                for (std::size_t i = 0; i < n.adj.numel(); ++i) {
                    gx.v[i] += n.adj.v[i] * y.v[i];
                    gy.v[i] += n.adj.v[i] * x.v[i];
                }
                break;
            }
            case Op::Scale: {
                Tensor& gx = nodes_[n.in[0]].adj;
                for (std::size_t i = 0; i < n.adj.numel(); ++i) gx.v[i] += n.a * n.adj.v[i];
                break;
            }
            case Op::Offset: {
                Tensor& gx = nodes_[n.in[0]].adj;
                for (std::size_t i = 0; i < n.adj.numel(); ++i) gx.v[i] += n.adj.v[i];
                break;
            }
            case Op::Tanh: {
                Tensor& gx = nodes_[n.in[0]].adj;
                for (std::size_t i = 0; i < n.adj.numel(); ++i)
                    gx.v[i] += n.adj.v[i] * (1.0 - n.val.v[i] * n.val.v[i]);
                break;
            }
            case Op::Softplus: {
                const Tensor& x = nodes_[n.in[0]].val;
                Tensor& gx = nodes_[n.in[0]].adj;
                for (std::size_t i = 0; i < n.adj.numel(); ++i)
                    gx.v[i] += n.adj.v[i] * softplus_deriv(x.v[i]);
                break;
            }
            case Op::Square: {
                const Tensor& x = nodes_[n.in[0]].val;
                Tensor& gx = nodes_[n.in[0]].adj;
                for (std::size_t i = 0; i < n.adj.numel(); ++i)
                    gx.v[i] += n.adj.v[i] * 2.0 * x.v[i];
                break;
            }
            case Op::Affine:
                affine_bwd(nodes_[n.in[0]].val, nodes_[n.in[1]].val, n.adj, nodes_[n.in[0]].adj,
                           nodes_[n.in[1]].adj, nodes_[n.in[2]].adj);
                break;
            case Op::Conv2d:
                conv2d_bwd(nodes_[n.in[0]].val, nodes_[n.in[1]].val, n.ia, n.adj,
                           nodes_[n.in[0]].adj, nodes_[n.in[1]].adj, nodes_[n.in[2]].adj);
                break;
            case Op::Conv1d:
                conv1d_bwd(nodes_[n.in[0]].val, nodes_[n.in[1]].val, n.adj, nodes_[n.in[0]].adj,
                           nodes_[n.in[1]].adj, nodes_[n.in[2]].adj);
                break;
            case Op::AvgPool2d:
                avgpool2d_bwd(nodes_[n.in[0]].val, n.ia, n.adj, nodes_[n.in[0]].adj);
                break;
            case Op::Concat2: {
                Tensor& gx = nodes_[n.in[0]].adj;
                Tensor& gy = nodes_[n.in[1]].adj;
                const int g = n.val.dim(1);
                for (int i = 0; i < g; ++i) {
                    gx.v[i] += n.adj.v[i];
                    gy.v[i] += n.adj.v[g + i];
                }
                break;
            }
            case Op::ConcatV: {
                Tensor& gx = nodes_[n.in[0]].adj;
                Tensor& gy = nodes_[n.in[1]].adj;
                const std::size_t nx = gx.numel();
                for (std::size_t i = 0; i < nx; ++i) gx.v[i] += n.adj.v[i];
                for (std::size_t i = 0; i < gy.numel(); ++i) gy.v[i] += n.adj.v[nx + i];
                break;
            }
            case Op::SliceRow: {
                Tensor& gz = nodes_[n.in[0]].adj;
                const int g = static_cast<int>(n.val.numel());
                for (int i = 0; i < g; ++i) gz.v[static_cast<std::size_t>(n.ia) * g + i] += n.adj.v[i];
                break;
            }
            case Op::Sum: {
                Tensor& gx = nodes_[n.in[0]].adj;
                for (auto& g : gx.v) g += n.adj.v[0];
                break;
            }
            case Op::Dot: {
                const Tensor& x = nodes_[n.in[0]].val;
                const Tensor& y = nodes_[n.in[1]].val;
                Tensor& gx = nodes_[n.in[0]].adj;
                Tensor& gy = nodes_[n.in[1]].adj;
                const double g = n.adj.v[0];
                for (std::size_t i = 0; i < x.numel(); ++i) {
                    gx.v[i] += g * y.v[i];
                    gy.v[i] += g * x.v[i];
                }
                break;
            }
            case Op::Lerp: {
                Tensor& gx = nodes_[n.in[0]].adj;
                Tensor& gy = nodes_[n.in[1]].adj;
                for (std::size_t i = 0; i < n.adj.numel(); ++i) {
                    gx.v[i] += (1.0 - n.a) * n.adj.v[i];
                    gy.v[i] += n.a * n.adj.v[i];
                }
                break;
            }
            case Op::Diff1d:
                diff1d_bwd(n.a, n.adj, nodes_[n.in[0]].adj);
                break;
            case Op::LatentStep:
                latent_step_bwd(nodes_[n.in[0]].val, nodes_[n.in[1]].val, nodes_[n.ia].val,
                                nodes_[n.in[2]].val, n.step, n.val, n.adj, nodes_[n.in[0]].adj,
                                nodes_[n.in[1]].adj, nodes_[n.ia].adj, nodes_[n.in[2]].adj);
                break;
        }
    }

    for (auto& n : nodes_) {
        if (n.param && n.adj.numel() == n.param->grad.numel()) {
            for (std::size_t i = 0; i < n.adj.numel(); ++i) n.param->grad.v[i] += n.adj.v[i];
        }
    }
}

GradCheckReport grad_check(const std::function<double(ParamStore&)>& loss_fn, ParamStore& ps,
                           double tolerance, std::size_t dense_limit,
                           std::size_t sparse_samples) {
    GradCheckReport report;

    // Analytic gradients.
    ps.zero_grad();
    loss_fn(ps);
    std::map<std::string, Tensor> analytic;
    for (auto& [name, b] : ps.blocks())
        if (b.trainable) analytic.emplace(name, b.grad);

    for (auto& [name, b] : ps.blocks()) {
        if (!b.trainable) continue;
        GradCheckBlockReport br;
        br.name = name;
        const std::size_t n = b.value.numel();
        const std::size_t stride = n <= dense_limit
                                       ? 1
                                       : std::max<std::size_t>(1, n / sparse_samples);
        for (std::size_t i = 0; i < n; i += stride) {
            const double x0 = b.value.v[i];
            const double h = 1e-4 * std::max(1.0, std::abs(x0));
            b.value.v[i] = x0 + h;
            const double fp = loss_fn(ps);
            b.value.v[i] = x0 - h;
            const double fm = loss_fn(ps);
            b.value.v[i] = x0;
            const double fd = (fp - fm) / (2.0 * h);
            const double ad = analytic.at(name).v[i];
            const double scale = std::max({std::abs(fd), std::abs(ad), 1e-6});
            const double rel = std::abs(fd - ad) / scale;
            br.max_rel_err = std::max(br.max_rel_err, rel);
            ++br.checked;
        }
        report.max_rel_err = std::max(report.max_rel_err, br.max_rel_err);
        report.blocks.push_back(std::move(br));
    }
    report.pass = report.max_rel_err < tolerance;
    ps.zero_grad();
    return report;
}

}  // namespace wavebench
