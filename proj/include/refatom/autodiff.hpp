#pragma once

#include "refatom/kernels.hpp"
#include "refatom/matrix.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

// Reverse-mode automatic differentiation over Matrix values. A Graph owns the
// per-evaluation node storage; Parameter leaves are shared model state whose
// gradients are harvested after backward(). Objectives must be 1x1.

namespace refatom::num {

struct Parameter {
    std::string name;
    Matrix value;
    Matrix grad;         // accumulated by Graph::backward / add_param_grads
    Matrix adam_m;       // optimizer moment buffers, lazily sized
    Matrix adam_v;
    std::size_t index = 0;

    void zero_grad() { grad = Matrix::zeros(value.rows(), value.cols()); }
};

struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    Parameter* param = nullptr;  // set on parameter leaves
    std::vector<std::shared_ptr<Node>> parents;
    // Propagates this node's grad into its parents' grads.
    std::function<void(Node&)> backprop;
};

class Var {
public:
    Var() = default;
    explicit Var(std::shared_ptr<Node> n) : node_(std::move(n)) {}
    const Matrix& value() const { return node_->value; }
    const Matrix& grad() const { return node_->grad; }
    std::shared_ptr<Node>& node() { return node_; }
    const std::shared_ptr<Node>& node() const { return node_; }
    bool defined() const { return node_ != nullptr; }
    std::size_t rows() const { return node_->value.rows(); }
    std::size_t cols() const { return node_->value.cols(); }

private:
    std::shared_ptr<Node> node_;
};

// One forward/backward evaluation. Keeps the parameter leaves it created so
// their per-instance gradients can be read out (and, in batch-parallel
// training, reduced in a deterministic instance order).
class Graph {
public:
    Var constant(Matrix m);
    Var use(Parameter& p);  // leaf sharing p's current value, requires_grad

    // Runs reverse accumulation from a 1x1 objective. Throws on non-scalar.
    void backward(const Var& objective);

    // After backward: adds each used parameter's leaf gradient into
    // Parameter::grad (sequential accumulation path).
    void add_param_grads();

    // After backward: writes leaf gradients into `sink`, indexed by
    // Parameter::index (deterministic batch reduction path). Entries for
    // parameters not used by this graph are left untouched.
    void export_param_grads(std::vector<Matrix>& sink) const;

    const std::vector<std::pair<Parameter*, std::shared_ptr<Node>>>& leaves() const {
        return leaves_;
    }

private:
    std::vector<std::pair<Parameter*, std::shared_ptr<Node>>> leaves_;
};

// Differentiable ops. All shape errors carry a dimension report.
Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var hadamard(const Var& a, const Var& b);
Var scale(const Var& a, double c);
Var add_row_broadcast(const Var& a, const Var& bias);
Var softmax(const Var& a, Axis axis);
Var softplus(const Var& a);
Var logistic(const Var& a);
Var log_clamped(const Var& a, double eps);  // ln(clamp(a, eps, 1-eps))
Var sum_all(const Var& a);                  // -> 1x1
Var mean_rows(const Var& a);                // (N x d) -> (1 x d)
Var concat_cols(const std::vector<Var>& parts);
Var slice_cols(const Var& a, std::size_t c0, std::size_t c1);  // [c0, c1)
// Reorders a 1x4 corner box so x1<=x2, y1<=y2; grads follow the permutation.
Var order_box(const Var& box);

}  // namespace refatom::num
