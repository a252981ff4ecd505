#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "latalign/tape.hpp"

namespace latalign {

/// Dense row-major matrix (a vector is a matrix with one column).
template <class T>
struct Tensor {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;

    Tensor() = default;
    Tensor(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}

    std::size_t size() const { return data.size(); }
    T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<const T> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
    std::span<const T> values() const { return data; }
};

/// Named parameter groups with a fixed insertion order.
template <class T>
class ParamSet {
public:
    void add(std::string name, Tensor<T> tensor);

    bool contains(const std::string& name) const { return index_.count(name) != 0; }
    const Tensor<T>& at(const std::string& name) const;
    Tensor<T>& at(const std::string& name);

    std::size_t group_count() const { return groups_.size(); }
    const std::string& name(std::size_t i) const { return names_[i]; }
    const Tensor<T>& group(std::size_t i) const { return groups_[i]; }
    Tensor<T>& group(std::size_t i) { return groups_[i]; }

    /// Total number of scalars across groups.
    std::size_t scalar_count() const;

private:
    std::vector<std::string> names_;
    std::vector<Tensor<T>> groups_;
    std::unordered_map<std::string, std::size_t> index_;
};

using ParamStore = ParamSet<double>;
using VarParams = ParamSet<Var>;

/// Zero-filled store with the same names and shapes.
ParamStore zeros_like(const ParamStore& params);

/// True when names, order and shapes agree.
bool same_layout(const ParamStore& a, const ParamStore& b);

/// Register every scalar of `params` as a leaf on `tape`, in group order. The
/// leaves occupy a contiguous index range starting at the returned set's first
/// scalar.
VarParams on_tape(const ParamStore& params, Tape& tape);

/// Scatter adjoints of the leaves created by on_tape back into a ParamStore.
ParamStore gather_gradient(const ParamStore& layout, const VarParams& leaves,
                           const std::vector<double>& adjoints);

struct GradientResult {
    double loss = 0.0;
    ParamStore gradient;
};

using LossFunction = std::function<Var(Tape&, const VarParams&)>;

/// Evaluate `loss_fn` on a fresh tape and return exact reverse-mode gradients.
GradientResult compute_gradient(const LossFunction& loss_fn, const ParamStore& params);

/// Uniform(-limit, limit) weights with limit = sqrt(6 / (fan_in + fan_out)).
Tensor<double> glorot_uniform(std::size_t rows, std::size_t cols, std::mt19937_64& rng);

}  // namespace latalign
