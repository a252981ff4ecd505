#include "latalign/params.hpp"

#include <cmath>

#include "latalign/error.hpp"

namespace latalign {

template <class T>
void ParamSet<T>::add(std::string name, Tensor<T> tensor) {
    if (index_.count(name)) throw ConfigError("duplicate parameter group '" + name + "'");
    index_.emplace(name, groups_.size());
    names_.push_back(std::move(name));
    groups_.push_back(std::move(tensor));
}

template <class T>
const Tensor<T>& ParamSet<T>::at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown parameter group '" + name + "'");
    return groups_[it->second];
}

template <class T>
Tensor<T>& ParamSet<T>::at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown parameter group '" + name + "'");
    return groups_[it->second];
}

template <class T>
std::size_t ParamSet<T>::scalar_count() const {
    std::size_t n = 0;
    for (const auto& g : groups_) n += g.size();
    return n;
}

template class ParamSet<double>;
template class ParamSet<Var>;

ParamStore zeros_like(const ParamStore& params) {
    ParamStore out;
    for (std::size_t i = 0; i < params.group_count(); ++i) {
        const auto& g = params.group(i);
        out.add(params.name(i), Tensor<double>(g.rows, g.cols, 0.0));
    }
    return out;
}

bool same_layout(const ParamStore& a, const ParamStore& b) {
    if (a.group_count() != b.group_count()) return false;
    for (std::size_t i = 0; i < a.group_count(); ++i) {
        if (a.name(i) != b.name(i)) return false;
        if (a.group(i).rows != b.group(i).rows || a.group(i).cols != b.group(i).cols) return false;
    }
    return true;
}

VarParams on_tape(const ParamStore& params, Tape& tape) {
    VarParams out;
    for (std::size_t i = 0; i < params.group_count(); ++i) {
        const auto& g = params.group(i);
        Tensor<Var> t;
        t.rows = g.rows;
        t.cols = g.cols;
        t.data.reserve(g.size());
        for (double v : g.data) t.data.push_back(tape.leaf(v));
        out.add(params.name(i), std::move(t));
    }
    return out;
}

ParamStore gather_gradient(const ParamStore& layout, const VarParams& leaves,
                           const std::vector<double>& adjoints) {
    ParamStore grad = zeros_like(layout);
    for (std::size_t i = 0; i < grad.group_count(); ++i) {
        auto& g = grad.group(i);
        const auto& l = leaves.group(i);
        for (std::size_t j = 0; j < g.size(); ++j) g.data[j] = adjoints[l.data[j].index];
    }
    return grad;
}

GradientResult compute_gradient(const LossFunction& loss_fn, const ParamStore& params) {
    Tape tape;
    tape.reserve(1 << 16, 1 << 18);
    VarParams leaves = on_tape(params, tape);
    Var loss = loss_fn(tape, leaves);
    GradientResult result;
    result.loss = loss.value();
    result.gradient = gather_gradient(params, leaves, tape.adjoints(loss));
    return result;
}

Tensor<double> glorot_uniform(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Tensor<double> t(rows, cols);
    for (double& v : t.data) v = dist(rng);
    return t;
}

}  // namespace latalign
