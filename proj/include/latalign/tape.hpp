#pragma once

// Reverse-mode differentiation over a recorded list of scalar operations.
//
// Every operation appends one node holding its value and the local partial
// derivatives with respect to its parents. Nodes may have any number of
// parents, so an affine output row or a small matrix product entry is a single
// node instead of a chain of binary ones. The reverse pass is one sweep over
// the node list.

#include <cmath>
#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

namespace latalign {

class Tape;

/// Handle to a node on a tape. Cheap to copy; only valid while its tape lives.
struct Var {
    Tape* tape = nullptr;
    std::uint32_t index = 0;

    double value() const;
};

class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var leaf(double value);

    // Append a node whose partials are given edge by edge. `op` names the
    // primitive for error messages when `value` is not finite.
    void begin_node();
    void push_edge(Var parent, double partial);
    Var end_node(double value, const char* op);

    Var unary(Var x, double value, double partial, const char* op);
    Var binary(Var x, double dx, Var y, double dy, double value, const char* op);

    double value(std::uint32_t index) const { return values_[index]; }
    std::size_t size() const { return values_.size(); }

    /// Adjoints of every node with respect to `output` (seeded with 1).
    std::vector<double> adjoints(Var output) const;

    void reserve(std::size_t nodes, std::size_t edges);
    void clear();

private:
    std::vector<double> values_;
    std::vector<std::uint32_t> edge_end_;
    std::vector<std::uint32_t> parent_;
    std::vector<double> partial_;
};

inline double Var::value() const { return tape->value(index); }

inline double value_of(double x) { return x; }
inline double value_of(Var x) { return x.value(); }

template <class T>
inline constexpr bool is_var_v = std::is_same_v<T, Var>;

// Arithmetic. Mixed double/Var overloads never record the double as a node.
Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator-(Var a);
Var operator+(Var a, double b);
Var operator+(double a, Var b);
Var operator-(Var a, double b);
Var operator-(double a, Var b);
Var operator*(Var a, double b);
Var operator*(double a, Var b);
Var operator/(Var a, double b);
Var operator/(double a, Var b);

inline Var& operator+=(Var& a, Var b) { return a = a + b; }
inline Var& operator-=(Var& a, Var b) { return a = a - b; }
inline Var& operator*=(Var& a, Var b) { return a = a * b; }
inline Var& operator+=(Var& a, double b) { return a = a + b; }
inline Var& operator*=(Var& a, double b) { return a = a * b; }

Var tanh(Var x);
Var exp(Var x);
Var log(Var x);
Var sqrt(Var x);
Var sigmoid(Var x);
Var square(Var x);
/// Subgradient 0 at x == 0.
Var abs(Var x);
/// Clamp with zero gradient outside [lo, hi].
Var clamp(Var x, double lo, double hi);

// Double overloads so templated code can call the same names for both scalar types.
inline double tanh(double x) { return std::tanh(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double abs(double x) { return std::abs(x); }
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double square(double x) { return x * x; }
inline double clamp(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }

/// bias + sum_i w[i] * x[i], recorded as a single node when any operand is a Var.
template <class W, class X, class B>
auto affine_dot(std::span<const W> w, std::span<const X> x, B bias);

/// sum_i w[i] * x[i] with constant weights.
template <class X>
X weighted_sum(std::span<const double> w, std::span<const X> x);

/// sum_i x[i]^2.
template <class X>
X sum_of_squares(std::span<const X> x);

/// sum_i x[i].
template <class X>
X sum(std::span<const X> x);

}  // namespace latalign

#include "latalign/tape_inl.hpp"
