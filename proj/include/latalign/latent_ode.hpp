#pragma once

// Patient-specific linear latent dynamics d/dt mu = A mu + c, solved in closed
// form from every encoded visit and combined into one trajectory by
// time-dependent inverse-variance weighting.

#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "latalign/error.hpp"
#include "latalign/params.hpp"

namespace latalign {

enum class Instrument { kR, kS };

template <class T>
struct OdeParams {
    Tensor<T> A;           // d x d, rate per unit time
    std::vector<T> c;      // d, offset per unit time
    bool homogeneous = false;

    std::size_t dim() const { return A.rows; }
};

template <class T>
struct InitialCondition {
    double time = 0.0;
    std::vector<T> value;
    Instrument source = Instrument::kR;
};

template <class T>
struct TrajectoryEstimate {
    std::vector<double> times;
    std::vector<std::vector<T>> values;                       // [time][dim]
    std::vector<std::vector<std::vector<double>>> weights;  // [time][init][dim]
};

/// Below this |det A| the offset term avoids A^{-1}.
inline constexpr double kSingularDetThreshold = 1e-8;
/// Fallback per-dimension variance when fewer than two intermediate solutions exist.
inline constexpr double kFallbackVariance = 1.0;
/// Lower bound on a variance before it is inverted into a weight.
inline constexpr double kVarianceFloor = 1e-8;
/// Times closer than this are the same visit.
inline constexpr double kTimeTolerance = 1e-9;

template <class T>
T constant_like(const T& ref, double v) {
    if constexpr (is_var_v<T>) {
        return ref.tape->leaf(v);
    } else {
        (void)ref;
        return v;
    }
}

double determinant(const Tensor<double>& m);

/// exp(M). Closed form for 2x2 (distinct real, complex, repeated eigenvalues),
/// scaling and squaring with a truncated Taylor series otherwise.
Tensor<double> matrix_exp(const Tensor<double>& m);

/// Scaling and squaring with a Taylor series of fixed order; every step is a
/// product of tape primitives so it differentiates for T = Var.
template <class T>
Tensor<T> matrix_exp_series(const Tensor<T>& m);

template <class T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

/// x with A x = b (Gaussian elimination, partial pivoting chosen on values).
template <class T>
std::vector<T> linear_solve(const Tensor<T>& a, std::span<const T> b);

/// mu(k + delta) = transition * mu(k) + offset.
template <class T>
struct Propagator {
    Tensor<T> transition;
    std::vector<T> offset;  // empty for homogeneous systems
};

/// Build the propagator over `delta` time units. When `closed_form` is set and
/// T is double, the 2x2 closed-form exponential is used.
template <class T>
Propagator<T> make_propagator(const OdeParams<T>& params, double delta, bool closed_form);

template <class T>
std::vector<T> propagate(const Propagator<T>& prop, std::span<const T> mu);

/// mu(t) for the initial value problem mu(init.time) = init.value.
template <class T>
std::vector<T> solve_ivp(const OdeParams<T>& params, const InitialCondition<T>& init, double t);

/// Per-dimension unbiased sample variance; kFallbackVariance when fewer than 2 entries.
std::vector<double> estimate_solution_variance(const std::vector<std::vector<double>>& solutions,
                                               std::size_t dim);

using WeightTable = std::vector<std::vector<std::vector<double>>>;  // [time][init][dim]

/// Inverse-variance weighted combination of the solutions started from every
/// initial condition, evaluated at each of `eval_times`. Variances (and so the
/// weights) are computed on values and enter the result as constants. When
/// `fixed_weights` is given those normalized weights are used instead.
template <class T>
TrajectoryEstimate<T> combined_trajectory(const OdeParams<T>& params,
                                          std::span<const InitialCondition<T>> inits,
                                          std::span<const double> eval_times,
                                          bool closed_form = !is_var_v<T>,
                                          const WeightTable* fixed_weights = nullptr);

}  // namespace latalign

#include "latalign/latent_ode_inl.hpp"
