#pragma once

#include "refatom/autodiff.hpp"
#include "refatom/rng.hpp"

#include <memory>
#include <string>
#include <vector>

namespace refatom::num {

// Owns every trainable Parameter of a model; indices are assigned in creation
// order and stay stable, which the deterministic batch-gradient reduction and
// the optimizer rely on.
class ParamBank {
public:
    explicit ParamBank(std::uint64_t init_seed) : seed_(init_seed) {}

    // uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)), substream keyed by name so
    // parameter creation order does not perturb other parameters' draws.
    Parameter* create(const std::string& name, std::size_t rows, std::size_t cols,
                      std::size_t fan_in);
    Parameter* create_zeros(const std::string& name, std::size_t rows, std::size_t cols);

    Parameter* find(const std::string& name);
    std::vector<Parameter*> all();
    std::size_t count() const { return params_.size(); }

    void zero_grads();

private:
    std::uint64_t seed_;
    std::vector<std::unique_ptr<Parameter>> params_;
};

struct LinearLayer {
    Parameter* weight = nullptr;  // d_in x d_out
    Parameter* bias = nullptr;    // 1 x d_out

    // (N x d_in) -> (N x d_out)
    Var apply(Graph& g, const Var& x) const {
        return add_row_broadcast(matmul(x, g.use(*weight)), g.use(*bias));
    }
    // Token-axis map: (N_src x d) -> (N_dst x d), weight N_src x N_dst.
    Var apply_tokens(Graph& g, const Var& x) const {
        return transpose(apply(g, transpose(x)));
    }

    // Forward-only variants for plain-matrix paths (evaluation, stream ops).
    Matrix apply_plain(const Matrix& x) const {
        return add_row_broadcast(matmul(x, weight->value), bias->value);
    }
    Matrix apply_tokens_plain(const Matrix& x) const {
        return transpose(apply_plain(transpose(x)));
    }

    std::size_t d_in() const { return weight->value.rows(); }
    std::size_t d_out() const { return weight->value.cols(); }
};

LinearLayer make_linear(ParamBank& bank, const std::string& name, std::size_t d_in,
                        std::size_t d_out);

}  // namespace refatom::num
