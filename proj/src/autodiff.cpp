#include "refatom/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace refatom::num {

namespace {

std::shared_ptr<Node> make_node(Matrix value, std::vector<std::shared_ptr<Node>> parents,
                                std::function<void(Node&)> backprop) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->parents = std::move(parents);
    for (const auto& p : n->parents)
        if (p->requires_grad) n->requires_grad = true;
    if (n->requires_grad) n->backprop = std::move(backprop);
    return n;
}

void ensure_grad(Node& n) {
    if (n.grad.rows() != n.value.rows() || n.grad.cols() != n.value.cols())
        n.grad = Matrix::zeros(n.value.rows(), n.value.cols());
}

void accumulate(Node& dst, const Matrix& g) {
    ensure_grad(dst);
    for (std::size_t i = 0; i < g.size(); ++i) dst.grad.vec()[i] += g.vec()[i];
}

}  // namespace

Var Graph::constant(Matrix m) {
    auto n = std::make_shared<Node>();
    n->value = std::move(m);
    return Var(std::move(n));
}

Var Graph::use(Parameter& p) {
    auto n = std::make_shared<Node>();
    n->value = p.value;
    n->requires_grad = true;
    n->param = &p;
    leaves_.emplace_back(&p, n);
    return Var(std::move(n));
}

void Graph::backward(const Var& objective) {
    const Matrix& v = objective.value();
    if (v.rows() != 1 || v.cols() != 1)
        throw ShapeError("backward: objective must be scalar (1x1), got " + v.shape_str());

    // iterative post-order topological sort
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(objective.node().get(), 0);
    visited.insert(objective.node().get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* p = node->parents[next++].get();
            if (p->requires_grad && visited.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    ensure_grad(*objective.node());
    objective.node()->grad(0, 0) = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backprop) {
            ensure_grad(*n);
            n->backprop(*n);
        }
    }
}

void Graph::add_param_grads() {
    for (auto& [param, node] : leaves_) {
        if (node->grad.empty()) continue;
        if (param->grad.empty()) param->zero_grad();
        for (std::size_t i = 0; i < node->grad.size(); ++i)
            param->grad.vec()[i] += node->grad.vec()[i];
    }
}

void Graph::export_param_grads(std::vector<Matrix>& sink) const {
    for (const auto& [param, node] : leaves_) {
        if (node->grad.empty()) continue;
        Matrix& slot = sink[param->index];
        if (slot.empty()) slot = Matrix::zeros(node->grad.rows(), node->grad.cols());
        for (std::size_t i = 0; i < node->grad.size(); ++i)
            slot.vec()[i] += node->grad.vec()[i];
    }
}

Var matmul(const Var& a, const Var& b) {
    Matrix v = matmul(a.value(), b.value());
    return Var(make_node(std::move(v), {a.node(), b.node()}, [](Node& self) {
        Node& A = *self.parents[0];
        Node& B = *self.parents[1];
        if (A.requires_grad) accumulate(A, matmul(self.grad, transpose(B.value)));
        if (B.requires_grad) accumulate(B, matmul(transpose(A.value), self.grad));
    }));
}

Var transpose(const Var& a) {
    return Var(make_node(transpose(a.value()), {a.node()}, [](Node& self) {
        accumulate(*self.parents[0], transpose(self.grad));
    }));
}

Var add(const Var& a, const Var& b) {
    return Var(make_node(add(a.value(), b.value()), {a.node(), b.node()}, [](Node& self) {
        if (self.parents[0]->requires_grad) accumulate(*self.parents[0], self.grad);
        if (self.parents[1]->requires_grad) accumulate(*self.parents[1], self.grad);
    }));
}

Var sub(const Var& a, const Var& b) {
    return Var(make_node(sub(a.value(), b.value()), {a.node(), b.node()}, [](Node& self) {
        if (self.parents[0]->requires_grad) accumulate(*self.parents[0], self.grad);
        if (self.parents[1]->requires_grad) accumulate(*self.parents[1], scale(self.grad, -1.0));
    }));
}

Var hadamard(const Var& a, const Var& b) {
    return Var(make_node(hadamard(a.value(), b.value()), {a.node(), b.node()}, [](Node& self) {
        Node& A = *self.parents[0];
        Node& B = *self.parents[1];
        if (A.requires_grad) accumulate(A, hadamard(self.grad, B.value));
        if (B.requires_grad) accumulate(B, hadamard(self.grad, A.value));
    }));
}

Var scale(const Var& a, double c) {
    return Var(make_node(scale(a.value(), c), {a.node()}, [c](Node& self) {
        accumulate(*self.parents[0], scale(self.grad, c));
    }));
}

Var add_row_broadcast(const Var& a, const Var& bias) {
    return Var(
        make_node(add_row_broadcast(a.value(), bias.value()), {a.node(), bias.node()},
                  [](Node& self) {
                      Node& A = *self.parents[0];
                      Node& B = *self.parents[1];
                      if (A.requires_grad) accumulate(A, self.grad);
                      if (B.requires_grad) {
                          Matrix g(1, self.grad.cols());
                          for (std::size_t i = 0; i < self.grad.rows(); ++i)
                              for (std::size_t j = 0; j < self.grad.cols(); ++j)
                                  g(0, j) += self.grad(i, j);
                          accumulate(B, g);
                      }
                  }));
}

Var softmax(const Var& a, Axis axis) {
    return Var(make_node(softmax(a.value(), axis), {a.node()}, [axis](Node& self) {
        const Matrix& y = self.value;
        const Matrix& dy = self.grad;
        Matrix dx(y.rows(), y.cols());
        if (axis == Axis::Rows) {
            for (std::size_t i = 0; i < y.rows(); ++i) {
                double dot = 0.0;
                for (std::size_t j = 0; j < y.cols(); ++j) dot += dy(i, j) * y(i, j);
                for (std::size_t j = 0; j < y.cols(); ++j)
                    dx(i, j) = y(i, j) * (dy(i, j) - dot);
            }
        } else {
            for (std::size_t j = 0; j < y.cols(); ++j) {
                double dot = 0.0;
                for (std::size_t i = 0; i < y.rows(); ++i) dot += dy(i, j) * y(i, j);
                for (std::size_t i = 0; i < y.rows(); ++i)
                    dx(i, j) = y(i, j) * (dy(i, j) - dot);
            }
        }
        accumulate(*self.parents[0], dx);
    }));
}

Var softplus(const Var& a) {
    Matrix v = map_unary(a.value(), [](double x) { return softplus(x); });
    return Var(make_node(std::move(v), {a.node()}, [](Node& self) {
        const Matrix& x = self.parents[0]->value;
        Matrix dx(x.rows(), x.cols());
        for (std::size_t i = 0; i < x.size(); ++i)
            dx.vec()[i] = self.grad.vec()[i] * logistic(x.vec()[i]);
        accumulate(*self.parents[0], dx);
    }));
}

Var logistic(const Var& a) {
    Matrix v = map_unary(a.value(), [](double x) { return logistic(x); });
    return Var(make_node(std::move(v), {a.node()}, [](Node& self) {
        const Matrix& y = self.value;
        Matrix dx(y.rows(), y.cols());
        for (std::size_t i = 0; i < y.size(); ++i)
            dx.vec()[i] = self.grad.vec()[i] * y.vec()[i] * (1.0 - y.vec()[i]);
        accumulate(*self.parents[0], dx);
    }));
}

Var log_clamped(const Var& a, double eps) {
    Matrix v = map_unary(a.value(), [eps](double x) {
        return std::log(std::clamp(x, eps, 1.0 - eps));
    });
    return Var(make_node(std::move(v), {a.node()}, [eps](Node& self) {
        const Matrix& x = self.parents[0]->value;
        Matrix dx(x.rows(), x.cols());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double xi = x.vec()[i];
            dx.vec()[i] = (xi > eps && xi < 1.0 - eps) ? self.grad.vec()[i] / xi : 0.0;
        }
        accumulate(*self.parents[0], dx);
    }));
}

Var sum_all(const Var& a) {
    double s = 0.0;
    for (double v : a.value().vec()) s += v;
    return Var(make_node(Matrix(1, 1, {s}), {a.node()}, [](Node& self) {
        const double g = self.grad(0, 0);
        Node& A = *self.parents[0];
        accumulate(A, Matrix::full(A.value.rows(), A.value.cols(), g));
    }));
}

Var mean_rows(const Var& a) {
    const Matrix& x = a.value();
    Matrix v(1, x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) v(0, j) += x(i, j);
    for (std::size_t j = 0; j < x.cols(); ++j) v(0, j) /= double(x.rows());
    return Var(make_node(std::move(v), {a.node()}, [](Node& self) {
        Node& A = *self.parents[0];
        const double inv = 1.0 / double(A.value.rows());
        Matrix g(A.value.rows(), A.value.cols());
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) = self.grad(0, j) * inv;
        accumulate(A, g);
    }));
}

Var concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw ShapeError("concat_cols: no inputs");
    const std::size_t rows = parts[0].rows();
    std::size_t cols = 0;
    for (const auto& p : parts) {
        if (p.rows() != rows)
            throw ShapeError("concat_cols: row mismatch " + p.value().shape_str());
        cols += p.cols();
    }
    Matrix v(rows, cols);
    std::size_t off = 0;
    std::vector<std::shared_ptr<Node>> parents;
    std::vector<std::size_t> offsets;
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < p.cols(); ++j) v(i, off + j) = p.value()(i, j);
        parents.push_back(p.node());
        offsets.push_back(off);
        off += p.cols();
    }
    return Var(make_node(std::move(v), std::move(parents), [offsets](Node& self) {
        for (std::size_t k = 0; k < self.parents.size(); ++k) {
            Node& P = *self.parents[k];
            if (!P.requires_grad) continue;
            Matrix g(P.value.rows(), P.value.cols());
            for (std::size_t i = 0; i < g.rows(); ++i)
                for (std::size_t j = 0; j < g.cols(); ++j)
                    g(i, j) = self.grad(i, offsets[k] + j);
            accumulate(P, g);
        }
    }));
}

Var slice_cols(const Var& a, std::size_t c0, std::size_t c1) {
    const Matrix& x = a.value();
    if (c0 >= c1 || c1 > x.cols())
        throw ShapeError("slice_cols: bad range [" + std::to_string(c0) + "," +
                         std::to_string(c1) + ") of " + x.shape_str());
    Matrix v(x.rows(), c1 - c0);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = c0; j < c1; ++j) v(i, j - c0) = x(i, j);
    return Var(make_node(std::move(v), {a.node()}, [c0](Node& self) {
        Node& A = *self.parents[0];
        Matrix g(A.value.rows(), A.value.cols());
        for (std::size_t i = 0; i < self.grad.rows(); ++i)
            for (std::size_t j = 0; j < self.grad.cols(); ++j) g(i, c0 + j) = self.grad(i, j);
        accumulate(A, g);
    }));
}

Var order_box(const Var& box) {
    const Matrix& b = box.value();
    if (b.rows() != 1 || b.cols() != 4)
        throw ShapeError("order_box: expected 1x4, got " + b.shape_str());
    // output slot -> input slot
    std::vector<std::size_t> perm = {0, 1, 2, 3};
    if (b(0, 0) > b(0, 2)) std::swap(perm[0], perm[2]);
    if (b(0, 1) > b(0, 3)) std::swap(perm[1], perm[3]);
    Matrix v(1, 4);
    for (std::size_t j = 0; j < 4; ++j) v(0, j) = b(0, perm[j]);
    return Var(make_node(std::move(v), {box.node()}, [perm](Node& self) {
        Matrix g(1, 4);
        for (std::size_t j = 0; j < 4; ++j) g(0, perm[j]) += self.grad(0, j);
        accumulate(*self.parents[0], g);
    }));
}

}  // namespace refatom::num
