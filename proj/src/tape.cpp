#include "latalign/tape.hpp"

#include <cassert>
#include <string>

#include "latalign/error.hpp"

namespace latalign {

namespace {

[[noreturn]] void throw_non_finite(const char* op, double value) {
    throw NumericError(std::string("non-finite value (") + std::to_string(value) +
                       ") produced by primitive '" + op + "'");
}

}  // namespace

Var Tape::leaf(double value) {
    if (!std::isfinite(value)) throw_non_finite("leaf", value);
    values_.push_back(value);
    edge_end_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return Var{this, static_cast<std::uint32_t>(values_.size() - 1)};
}

void Tape::begin_node() {}

void Tape::push_edge(Var parent, double partial) {
    assert(parent.tape == this);
    parent_.push_back(parent.index);
    partial_.push_back(partial);
}

Var Tape::end_node(double value, const char* op) {
    if (!std::isfinite(value)) throw_non_finite(op, value);
    values_.push_back(value);
    edge_end_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return Var{this, static_cast<std::uint32_t>(values_.size() - 1)};
}

Var Tape::unary(Var x, double value, double partial, const char* op) {
    push_edge(x, partial);
    return end_node(value, op);
}

Var Tape::binary(Var x, double dx, Var y, double dy, double value, const char* op) {
    push_edge(x, dx);
    push_edge(y, dy);
    return end_node(value, op);
}

std::vector<double> Tape::adjoints(Var output) const {
    assert(output.tape == this);
    std::vector<double> adj(values_.size(), 0.0);
    adj[output.index] = 1.0;
    for (std::size_t i = output.index + 1; i-- > 0;) {
        const double a = adj[i];
        if (a == 0.0) continue;
        const std::uint32_t begin = i == 0 ? 0 : edge_end_[i - 1];
        const std::uint32_t end = edge_end_[i];
        for (std::uint32_t e = begin; e < end; ++e) adj[parent_[e]] += a * partial_[e];
    }
    return adj;
}

void Tape::reserve(std::size_t nodes, std::size_t edges) {
    values_.reserve(nodes);
    edge_end_.reserve(nodes);
    parent_.reserve(edges);
    partial_.reserve(edges);
}

void Tape::clear() {
    values_.clear();
    edge_end_.clear();
    parent_.clear();
    partial_.clear();
}

Var operator+(Var a, Var b) { return a.tape->binary(a, 1.0, b, 1.0, a.value() + b.value(), "add"); }
Var operator-(Var a, Var b) { return a.tape->binary(a, 1.0, b, -1.0, a.value() - b.value(), "sub"); }
Var operator*(Var a, Var b) {
    return a.tape->binary(a, b.value(), b, a.value(), a.value() * b.value(), "mul");
}
Var operator/(Var a, Var b) {
    const double bv = b.value();
    const double q = a.value() / bv;
    return a.tape->binary(a, 1.0 / bv, b, -q / bv, q, "div");
}
Var operator-(Var a) { return a.tape->unary(a, -a.value(), -1.0, "neg"); }
Var operator+(Var a, double b) { return a.tape->unary(a, a.value() + b, 1.0, "add"); }
Var operator+(double a, Var b) { return b + a; }
Var operator-(Var a, double b) { return a.tape->unary(a, a.value() - b, 1.0, "sub"); }
Var operator-(double a, Var b) { return b.tape->unary(b, a - b.value(), -1.0, "sub"); }
Var operator*(Var a, double b) { return a.tape->unary(a, a.value() * b, b, "mul"); }
Var operator*(double a, Var b) { return b * a; }
Var operator/(Var a, double b) { return a.tape->unary(a, a.value() / b, 1.0 / b, "div"); }
Var operator/(double a, Var b) {
    const double bv = b.value();
    return b.tape->unary(b, a / bv, -a / (bv * bv), "div");
}

Var tanh(Var x) {
    const double y = std::tanh(x.value());
    return x.tape->unary(x, y, 1.0 - y * y, "tanh");
}

Var exp(Var x) {
    const double y = std::exp(x.value());
    return x.tape->unary(x, y, y, "exp");
}

Var log(Var x) {
    const double v = x.value();
    return x.tape->unary(x, std::log(v), 1.0 / v, "log");
}

Var sqrt(Var x) {
    const double y = std::sqrt(x.value());
    return x.tape->unary(x, y, 0.5 / y, "sqrt");
}

Var sigmoid(Var x) {
    const double y = sigmoid(x.value());
    return x.tape->unary(x, y, y * (1.0 - y), "sigmoid");
}

Var square(Var x) {
    const double v = x.value();
    return x.tape->unary(x, v * v, 2.0 * v, "square");
}

Var abs(Var x) {
    const double v = x.value();
    const double s = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    return x.tape->unary(x, std::abs(v), s, "abs");
}

Var clamp(Var x, double lo, double hi) {
    const double v = x.value();
    if (v < lo) return x.tape->unary(x, lo, 0.0, "clamp");
    if (v > hi) return x.tape->unary(x, hi, 0.0, "clamp");
    return x.tape->unary(x, v, 1.0, "clamp");
}

}  // namespace latalign
