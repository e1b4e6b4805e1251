#include "refatom/linear.hpp"

#include <cmath>

namespace refatom::num {

Parameter* ParamBank::create(const std::string& name, std::size_t rows, std::size_t cols,
                             std::size_t fan_in) {
    auto p = std::make_unique<Parameter>();
    p->name = name;
    p->index = params_.size();
    p->value = Matrix(rows, cols);
    const double bound = 1.0 / std::sqrt(double(fan_in > 0 ? fan_in : 1));
    Rng rng = make_rng(seed_, fnv1a64(name));
    for (auto& v : p->value.vec()) v = uniform(rng, -bound, bound);
    p->zero_grad();
    params_.push_back(std::move(p));
    return params_.back().get();
}

Parameter* ParamBank::create_zeros(const std::string& name, std::size_t rows,
                                   std::size_t cols) {
    auto p = std::make_unique<Parameter>();
    p->name = name;
    p->index = params_.size();
    p->value = Matrix(rows, cols);
    p->zero_grad();
    params_.push_back(std::move(p));
    return params_.back().get();
}

Parameter* ParamBank::find(const std::string& name) {
    for (auto& p : params_)
        if (p->name == name) return p.get();
    return nullptr;
}

std::vector<Parameter*> ParamBank::all() {
    std::vector<Parameter*> out;
    out.reserve(params_.size());
    for (auto& p : params_) out.push_back(p.get());
    return out;
}

void ParamBank::zero_grads() {
    for (auto& p : params_) p->zero_grad();
}

LinearLayer make_linear(ParamBank& bank, const std::string& name, std::size_t d_in,
                        std::size_t d_out) {
    LinearLayer l;
    l.weight = bank.create(name + ".weight", d_in, d_out, d_in);
    l.bias = bank.create(name + ".bias", 1, d_out, d_in);
    return l;
}

}  // namespace refatom::num
