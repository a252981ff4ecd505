#pragma once

// Template definitions for tape.hpp; not meant to be included directly.

#include <cassert>

namespace latalign {
namespace detail {

template <class... Ts>
inline constexpr bool any_var_v = (is_var_v<Ts> || ...);

template <class T>
inline Tape* tape_of(const T& x) {
    if constexpr (is_var_v<T>) {
        return x.tape;
    } else {
        (void)x;
        return nullptr;
    }
}

}  // namespace detail

template <class W, class X, class B>
auto affine_dot(std::span<const W> w, std::span<const X> x, B bias) {
    assert(w.size() == x.size());
    if constexpr (!detail::any_var_v<W, X, B>) {
        double acc = bias;
        for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * x[i];
        return acc;
    } else {
        Tape* tape = detail::tape_of(bias);
        if (!tape && !w.empty()) tape = detail::tape_of(w[0]);
        if (!tape && !x.empty()) tape = detail::tape_of(x[0]);
        assert(tape != nullptr);
        double acc = value_of(bias);
        tape->begin_node();
        if constexpr (is_var_v<B>) tape->push_edge(bias, 1.0);
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double wv = value_of(w[i]);
            const double xv = value_of(x[i]);
            acc += wv * xv;
            if constexpr (is_var_v<W>) tape->push_edge(w[i], xv);
            if constexpr (is_var_v<X>) tape->push_edge(x[i], wv);
        }
        return tape->end_node(acc, "affine");
    }
}

template <class X>
X weighted_sum(std::span<const double> w, std::span<const X> x) {
    assert(w.size() == x.size());
    if constexpr (!is_var_v<X>) {
        double acc = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * x[i];
        return acc;
    } else {
        assert(!x.empty());
        Tape* tape = x[0].tape;
        double acc = 0.0;
        tape->begin_node();
        for (std::size_t i = 0; i < w.size(); ++i) {
            acc += w[i] * x[i].value();
            tape->push_edge(x[i], w[i]);
        }
        return tape->end_node(acc, "weighted_sum");
    }
}

template <class X>
X sum_of_squares(std::span<const X> x) {
    if constexpr (!is_var_v<X>) {
        double acc = 0.0;
        for (double v : x) acc += v * v;
        return acc;
    } else {
        assert(!x.empty());
        Tape* tape = x[0].tape;
        double acc = 0.0;
        tape->begin_node();
        for (const Var& v : x) {
            const double xv = v.value();
            acc += xv * xv;
            tape->push_edge(v, 2.0 * xv);
        }
        return tape->end_node(acc, "sum_of_squares");
    }
}

template <class X>
X sum(std::span<const X> x) {
    if constexpr (!is_var_v<X>) {
        double acc = 0.0;
        for (double v : x) acc += v;
        return acc;
    } else {
        assert(!x.empty());
        Tape* tape = x[0].tape;
        double acc = 0.0;
        tape->begin_node();
        for (const Var& v : x) {
            acc += v.value();
            tape->push_edge(v, 1.0);
        }
        return tape->end_node(acc, "sum");
    }
}

}  // namespace latalign
