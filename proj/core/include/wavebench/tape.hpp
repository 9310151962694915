#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wavebench/params.hpp"
#include "wavebench/tensor.hpp"

namespace wavebench {

// Append-only computation graph over Tensors. Node ids are indices into the
// tape; every input id must precede its consumer, which keeps the graph
// acyclic by construction and makes reverse order a valid topological order.
// Primal values are cached per node (full per-step storage), so one backward
// pass after a rollout touches each state exactly once.
class Tape {
  public:
    enum class Op {
        Leaf,
        Add,
        Sub,
        Mul,
        Scale,     // a * x
        Offset,    // x + a
        Tanh,
        Softplus,
        Square,
        Affine,    // Wx + b
        Conv2d,
        Conv1d,
        AvgPool2d,
        Concat2,   // [x; y] -> [2, G] rows
        ConcatV,   // [x, y] -> vector of length |x|+|y|
        SliceRow,  // row r of [2, G]
        Sum,
        Dot,
        Lerp,      // x + a*(y - x)
        Diff1d,
        LatentStep,
    };

    struct Node {
        Op op;
        int in[3] = {-1, -1, -1};
        double a = 0.0;          // scalar payload (scale factor, lerp weight, ...)
        int ia = 0;              // integer payload (stride, window, row)
        LatentStepParams step;   // LatentStep payload
        Tensor val;
        Tensor adj;
        ParamBlock* param = nullptr;  // set on parameter leaves
    };

    int leaf(Tensor value);
    // Parameter leaf bound to a ParamStore block; backward accumulates into
    // the block's gradient.
    int param(ParamStore& ps, const std::string& name);

    int add(int x, int y);
    int sub(int x, int y);
    int mul(int x, int y);
    int scale(int x, double a);
    int offset(int x, double a);
    int tanh_(int x);
    int softplus_(int x);
    int square_(int x);
    int affine(int W, int x, int b);
    int conv2d(int x, int k, int b, int stride);
    int conv1d(int x, int k, int b);
    int avgpool2d(int x, int win);
    int concat2(int x, int y);
    int concatv(int x, int y);
    int slice_row(int z, int row);
    int sum(int x);
    int dot(int x, int y);
    int lerp(int x, int y, double w);
    int diff1d(int u, double dx);
    int latent_step(int z, int C, int L, int s, const LatentStepParams& p);

    const Tensor& value(int id) const { return nodes_[check(id)].val; }
    const Tensor& adjoint(int id) const { return nodes_[check(id)].adj; }
    std::size_t size() const { return nodes_.size(); }
    void reserve(std::size_t n) { nodes_.reserve(n); }

    // Reverse pass from a scalar root; parameter-leaf adjoints are added to
    // their blocks' gradients.
    void backward(int root);

  private:
    int push(Node n);
    int check(int id) const;
    std::vector<Node> nodes_;
};

struct GradCheckBlockReport {
    std::string name;
    double max_rel_err = 0.0;
    std::size_t checked = 0;
};

struct GradCheckReport {
    std::vector<GradCheckBlockReport> blocks;
    double max_rel_err = 0.0;
    bool pass = false;
};

// Central finite differences (h scaled per coordinate) against tape
// gradients of a scalar-valued builder. Checks every coordinate when a block
// has at most `dense_limit` entries, otherwise a deterministic stride sample.
GradCheckReport grad_check(const std::function<double(ParamStore&)>& loss_fn, ParamStore& ps,
                           double tolerance, std::size_t dense_limit = 64,
                           std::size_t sparse_samples = 8);

}  // namespace wavebench
