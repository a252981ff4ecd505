#pragma once

// Template definitions for latent_ode.hpp.

#include <algorithm>
#include <cmath>

namespace latalign {
namespace ode_detail {

// Taylor order after scaling the argument to norm <= 0.5: 0.5^15 / 15! ~ 2e-17.
inline constexpr int kTaylorOrder = 14;

template <class T>
Tensor<T> identity_like(const T& ref, std::size_t d) {
    Tensor<T> out;
    out.rows = d;
    out.cols = d;
    out.data.reserve(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) out.data.push_back(constant_like(ref, i == j ? 1.0 : 0.0));
    return out;
}

template <class T>
double one_norm(const Tensor<T>& m) {
    double best = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) s += std::abs(value_of(m(i, j)));
        best = std::max(best, s);
    }
    return best;
}

template <class T>
std::vector<T> column(const Tensor<T>& m, std::size_t j) {
    std::vector<T> out;
    out.reserve(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) out.push_back(m(i, j));
    return out;
}

}  // namespace ode_detail

template <class T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.cols != b.rows) throw ConfigError("matmul: inner dimensions differ");
    Tensor<T> out;
    out.rows = a.rows;
    out.cols = b.cols;
    out.data.reserve(a.rows * b.cols);
    std::vector<std::vector<T>> cols;
    for (std::size_t j = 0; j < b.cols; ++j) cols.push_back(ode_detail::column(b, j));
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < b.cols; ++j)
            out.data.push_back(affine_dot(a.row(i), std::span<const T>(cols[j]), 0.0));
    return out;
}

template <class T>
Tensor<T> matrix_exp_series(const Tensor<T>& m) {
    if (m.rows != m.cols || m.rows == 0) throw ConfigError("matrix_exp: matrix must be square");
    const std::size_t d = m.rows;
    const double norm = ode_detail::one_norm(m);
    if (!std::isfinite(norm)) throw NumericError("matrix_exp: non-finite input");
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const double scale = std::ldexp(1.0, -squarings);

    // Horner: R = I + (M/k) R for k = N..1, starting from R = I.
    Tensor<T> result = ode_detail::identity_like(m.data[0], d);
    for (int k = ode_detail::kTaylorOrder; k >= 1; --k) {
        Tensor<T> mk = m;
        for (auto& v : mk.data) v = v * (scale / k);
        std::vector<std::vector<T>> cols;
        for (std::size_t j = 0; j < d; ++j) cols.push_back(ode_detail::column(result, j));
        Tensor<T> next;
        next.rows = d;
        next.cols = d;
        next.data.reserve(d * d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                next.data.push_back(affine_dot(mk.row(i), std::span<const T>(cols[j]), i == j ? 1.0 : 0.0));
        result = std::move(next);
    }
    for (int s = 0; s < squarings; ++s) result = matmul(result, result);
    for (const auto& v : result.data)
        if (!std::isfinite(value_of(v))) throw NumericError("matrix_exp: overflow");
    return result;
}

template <class T>
std::vector<T> linear_solve(const Tensor<T>& a, std::span<const T> b) {
    const std::size_t n = a.rows;
    if (a.cols != n || b.size() != n) throw ConfigError("linear_solve: shape mismatch");
    Tensor<T> m = a;
    std::vector<T> rhs(b.begin(), b.end());
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(value_of(m(r, col))) > std::abs(value_of(m(pivot, col)))) pivot = r;
        if (value_of(m(pivot, col)) == 0.0) throw NumericError("linear_solve: singular matrix");
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(m(col, c), m(pivot, c));
            std::swap(rhs[col], rhs[pivot]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            T f = m(r, col) / m(col, col);
            for (std::size_t c = col + 1; c < n; ++c) m(r, c) = m(r, c) - f * m(col, c);
            rhs[r] = rhs[r] - f * rhs[col];
        }
    }
    std::vector<T> x(rhs);
    for (std::size_t i = n; i-- > 0;) {
        T acc = rhs[i];
        for (std::size_t c = i + 1; c < n; ++c) acc = acc - m(i, c) * x[c];
        x[i] = acc / m(i, i);
    }
    return x;
}

template <class T>
Propagator<T> make_propagator(const OdeParams<T>& params, double delta, bool closed_form) {
    const std::size_t d = params.dim();
    if (d == 0 || params.A.cols != d) throw ConfigError("ODE system matrix must be square");
    if (!params.homogeneous && params.c.size() != d) throw ConfigError("ODE offset has wrong length");

    auto exp_of = [&](const Tensor<T>& m) {
        if constexpr (!is_var_v<T>) {
            if (closed_form) return matrix_exp(m);
        }
        return matrix_exp_series(m);
    };

    Propagator<T> prop;
    Tensor<T> scaled = params.A;
    for (auto& v : scaled.data) v = v * delta;

    if (params.homogeneous) {
        prop.transition = exp_of(scaled);
        return prop;
    }

    Tensor<double> a_values(d, d);
    for (std::size_t i = 0; i < d * d; ++i) a_values.data[i] = value_of(params.A.data[i]);
    if (std::abs(determinant(a_values)) >= kSingularDetThreshold) {
        // exp(A delta)(A^{-1}c + mu) - A^{-1}c
        prop.transition = exp_of(scaled);
        std::vector<T> v = linear_solve(params.A, std::span<const T>(params.c));
        std::vector<T> ev = propagate(Propagator<T>{prop.transition, {}}, std::span<const T>(v));
        prop.offset.reserve(d);
        for (std::size_t i = 0; i < d; ++i) prop.offset.push_back(ev[i] - v[i]);
        return prop;
    }

    // exp([[A, c], [0, 0]] delta) = [[exp(A delta), delta phi1(A delta) c], [0, 1]]
    const T& ref = params.A.data[0];
    Tensor<T> aug;
    aug.rows = d + 1;
    aug.cols = d + 1;
    aug.data.reserve((d + 1) * (d + 1));
    for (std::size_t i = 0; i <= d; ++i) {
        for (std::size_t j = 0; j <= d; ++j) {
            if (i < d && j < d) aug.data.push_back(scaled(i, j));
            else if (i < d) aug.data.push_back(params.c[i] * delta);
            else aug.data.push_back(constant_like(ref, 0.0));
        }
    }
    Tensor<T> e = matrix_exp_series(aug);
    prop.transition.rows = d;
    prop.transition.cols = d;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) prop.transition.data.push_back(e(i, j));
        prop.offset.push_back(e(i, d));
    }
    return prop;
}

template <class T>
std::vector<T> propagate(const Propagator<T>& prop, std::span<const T> mu) {
    const std::size_t d = prop.transition.rows;
    if (mu.size() != d) throw ConfigError("propagate: state has wrong length");
    std::vector<T> out;
    out.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        if (prop.offset.empty()) out.push_back(affine_dot(prop.transition.row(i), mu, 0.0));
        else out.push_back(affine_dot(prop.transition.row(i), mu, prop.offset[i]));
    }
    return out;
}

template <class T>
std::vector<T> solve_ivp(const OdeParams<T>& params, const InitialCondition<T>& init, double t) {
    if (!std::isfinite(t) || !std::isfinite(init.time)) throw PreconditionError("solve_ivp: non-finite time");
    const Propagator<T> prop = make_propagator(params, t - init.time, !is_var_v<T>);
    return propagate(prop, std::span<const T>(init.value));
}

template <class T>
TrajectoryEstimate<T> combined_trajectory(const OdeParams<T>& params,
                                          std::span<const InitialCondition<T>> inits,
                                          std::span<const double> eval_times, bool closed_form,
                                          const WeightTable* fixed_weights) {
    if (inits.empty()) throw PreconditionError("combined_trajectory: no initial conditions");
    const std::size_t d = params.dim();
    const std::size_t n = inits.size();
    for (const auto& init : inits)
        if (init.value.size() != d) throw ConfigError("combined_trajectory: initial value has wrong length");

    std::map<double, Propagator<T>> cache;
    auto propagator_for = [&](double delta) -> const Propagator<T>& {
        auto it = cache.find(delta);
        if (it == cache.end()) it = cache.emplace(delta, make_propagator(params, delta, closed_form)).first;
        return it->second;
    };

    TrajectoryEstimate<T> est;
    est.times.assign(eval_times.begin(), eval_times.end());
    est.values.reserve(eval_times.size());
    est.weights.reserve(eval_times.size());

    std::vector<std::vector<T>> sols(n);
    std::vector<std::vector<double>> sol_values(n, std::vector<double>(d));
    for (double t : eval_times) {
        if (!std::isfinite(t)) throw PreconditionError("combined_trajectory: non-finite evaluation time");
        for (std::size_t k = 0; k < n; ++k) {
            sols[k] = propagate(propagator_for(t - inits[k].time), std::span<const T>(inits[k].value));
            for (std::size_t i = 0; i < d; ++i) sol_values[k][i] = value_of(sols[k][i]);
        }

        std::vector<std::vector<double>> w(n, std::vector<double>(d));
        std::vector<std::vector<double>> between;
        const std::size_t ti = est.values.size();
        if (fixed_weights) {
            if (fixed_weights->size() != eval_times.size() || (*fixed_weights)[ti].size() != n)
                throw ConfigError("combined_trajectory: fixed weight table has wrong shape");
            w = (*fixed_weights)[ti];
        }
        for (std::size_t k = 0; k < n && !fixed_weights; ++k) {
            const double lo = std::min(inits[k].time, t);
            const double hi = std::max(inits[k].time, t);
            between.clear();
            for (std::size_t j = 0; j < n; ++j) {
                const double tj = inits[j].time;
                if (tj > lo + kTimeTolerance && tj < hi - kTimeTolerance) between.push_back(sol_values[j]);
            }
            const std::vector<double> var = estimate_solution_variance(between, d);
            for (std::size_t i = 0; i < d; ++i) w[k][i] = 1.0 / std::max(var[i], kVarianceFloor);
        }
        for (std::size_t i = 0; i < d && !fixed_weights; ++i) {
            double total = 0.0;
            for (std::size_t k = 0; k < n; ++k) total += w[k][i];
            for (std::size_t k = 0; k < n; ++k) w[k][i] /= total;
        }

        std::vector<T> value;
        value.reserve(d);
        std::vector<double> wi(n);
        std::vector<T> xi;
        xi.reserve(n);
        for (std::size_t i = 0; i < d; ++i) {
            xi.clear();
            for (std::size_t k = 0; k < n; ++k) {
                wi[k] = w[k][i];
                xi.push_back(sols[k][i]);
            }
            value.push_back(weighted_sum(std::span<const double>(wi), std::span<const T>(xi)));
        }
        est.values.push_back(std::move(value));
        est.weights.push_back(std::move(w));
    }
    return est;
}

}  // namespace latalign
