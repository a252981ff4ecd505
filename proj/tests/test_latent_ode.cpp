#include <doctest.h>

#include <cmath>
#include <random>

#include "latalign/latent_ode.hpp"
#include "test_support.hpp"

using namespace latalign;

namespace {

Tensor<double> mat2(double a, double b, double c, double d) {
    Tensor<double> m(2, 2);
    m.data = {a, b, c, d};
    return m;
}

double max_abs_diff(const Tensor<double>& a, const Tensor<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

OdeParams<double> ode(Tensor<double> A, std::vector<double> c = {}) {
    OdeParams<double> p;
    p.A = std::move(A);
    p.homogeneous = c.empty();
    p.c = c.empty() ? std::vector<double>(p.A.rows, 0.0) : std::move(c);
    return p;
}

}  // namespace

TEST_CASE("2x2 closed-form exponential against a long-double Taylor series") {
    const std::vector<Tensor<double>> cases{
        mat2(0.3, 1.2, -0.7, -0.5),   // complex pair
        mat2(0.5, 0.2, 0.1, -0.9),    // distinct real
        mat2(-0.4, 1.0, 0.0, -0.4),   // repeated, defective
        mat2(0.0, 0.0, 0.0, 0.0),
        mat2(2.5, -3.0, 4.0, 1.5),
    };
    for (const auto& m : cases) {
        const auto ref = testing::taylor_exp_reference(m);
        double scale = 1.0;
        for (double v : ref.data) scale = std::max(scale, std::abs(v));
        CHECK(max_abs_diff(matrix_exp(m), ref) < 1e-13 * scale);
        CHECK(max_abs_diff(matrix_exp_series(m), ref) < 1e-12 * scale);
    }
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 40; ++i) {
        Tensor<double> m(3, 3);
        for (double& v : m.data) v = u(rng);
        CHECK(max_abs_diff(matrix_exp(m), testing::taylor_exp_reference(m)) < 1e-11);
    }
}

TEST_CASE("determinant") {
    CHECK(determinant(mat2(1, 2, 3, 4)) == -2.0);
    Tensor<double> m(3, 3);
    m.data = {2, 0, 1, 1, 3, 0, 0, 1, 4};
    CHECK(determinant(m) == doctest::Approx(25.0).epsilon(1e-14));
}

TEST_CASE("solve_ivp returns the initial value at its own time on every branch") {
    const std::vector<OdeParams<double>> systems{
        ode(mat2(-0.3, 0.2, 0.1, -0.5), {0.4, -0.2}),        // invertible
        ode(mat2(1.0, 2.0, 0.5, 1.0), {0.4, -0.2}),          // singular
        ode(mat2(0.0, 0.0, 0.0, 0.0), {0.4, -0.2}),          // A = 0
        ode(mat2(-0.3, 0.2, 0.1, -0.5)),                     // homogeneous
    };
    const InitialCondition<double> init{1.7, {0.9, -1.3}};
    for (const auto& p : systems) {
        const auto y = solve_ivp(p, init, 1.7);
        CHECK(std::abs(y[0] - 0.9) < 1e-10);
        CHECK(std::abs(y[1] + 1.3) < 1e-10);
    }
}

TEST_CASE("A = 0 gives c (t - k) + mu") {
    const auto p = ode(mat2(0, 0, 0, 0), {0.4, -0.2});
    const auto y = solve_ivp(p, InitialCondition<double>{2.0, {1.0, 1.0}}, 5.0);
    CHECK(y[0] == doctest::Approx(1.0 + 0.4 * 3.0).epsilon(1e-14));
    CHECK(y[1] == doctest::Approx(1.0 - 0.2 * 3.0).epsilon(1e-14));
}

TEST_CASE("solutions agree with RK4 for singular and invertible systems") {
    for (const auto& A : {mat2(-0.3, 0.8, -0.6, -0.2), mat2(1.0, 2.0, 0.5, 1.0), mat2(0.4, 0.0, 0.0, 0.0)}) {
        const std::vector<double> c{0.3, -0.7};
        const auto p = ode(A, c);
        const std::vector<double> y0{0.5, 0.25};
        const auto ref = testing::rk4(A, c, y0, 1e-3, 2000, 500);
        for (std::size_t m = 0; m < ref.size(); ++m) {
            const auto y = solve_ivp(p, InitialCondition<double>{0.0, y0}, 0.5 * static_cast<double>(m));
            CHECK(std::abs(y[0] - ref[m][0]) < 1e-9);
            CHECK(std::abs(y[1] - ref[m][1]) < 1e-9);
        }
    }
}

TEST_CASE("semigroup property") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        auto p = ode(mat2(-1.0 + 0.5 * u(rng), u(rng), u(rng), -1.0 + 0.5 * u(rng)), {u(rng), u(rng)});
        const InitialCondition<double> init{0.3, {u(rng), u(rng)}};
        const auto mid = solve_ivp(p, init, 1.1);
        const auto two_step = solve_ivp(p, InitialCondition<double>{1.1, mid}, 2.6);
        const auto direct = solve_ivp(p, init, 2.6);
        CHECK(std::abs(two_step[0] - direct[0]) < 1e-8);
        CHECK(std::abs(two_step[1] - direct[1]) < 1e-8);
    }
}

TEST_CASE("branch agreement just above the singular threshold") {
    const double det = 1.5 * kSingularDetThreshold;
    // A = [[1, 1], [1, 1 + det]] has determinant det.
    const auto p = ode(mat2(1.0, 1.0, 1.0, 1.0 + det), {0.2, 0.1});
    const auto q = ode(mat2(1.0, 1.0, 1.0, 1.0 + 0.5 * det), {0.2, 0.1});
    const InitialCondition<double> init{0.0, {0.1, -0.1}};
    const auto a = solve_ivp(p, init, 0.8);
    const auto b = solve_ivp(q, init, 0.8);
    CHECK(std::abs(a[0] - b[0]) < 1e-6);
    CHECK(std::abs(a[1] - b[1]) < 1e-6);
}

TEST_CASE("estimate_solution_variance") {
    auto v = estimate_solution_variance({{1, 1}, {1, 1}}, 2);
    CHECK(v == std::vector<double>{0.0, 0.0});
    v = estimate_solution_variance({{0, 0}, {2, 4}, {4, 8}}, 2);
    CHECK(v[0] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(16.0).epsilon(1e-15));
    v = estimate_solution_variance({{3, 3}}, 2);
    CHECK(v == std::vector<double>{kFallbackVariance, kFallbackVariance});
}

TEST_CASE("combined_trajectory with given variances reproduces the weighted mean") {
    // Constant solutions 0, 2, 4 with variances 1, 1, 2.
    auto p = ode(Tensor<double>(1, 1));
    const std::vector<InitialCondition<double>> inits{{0.0, {0.0}}, {1.0, {2.0}}, {2.0, {4.0}}};
    const std::vector<double> t{5.0};
    const WeightTable w{{{1.0 / 2.5}, {1.0 / 2.5}, {0.5 / 2.5}}};
    const auto est = combined_trajectory(p, std::span<const InitialCondition<double>>(inits),
                                         std::span<const double>(t), true, &w);
    CHECK(est.values[0][0] == doctest::Approx(1.6).epsilon(1e-15));

    const WeightTable bad{{{1.0}, {0.0}}};
    CHECK_THROWS_AS(combined_trajectory(p, std::span<const InitialCondition<double>>(inits),
                                        std::span<const double>(t), true, &bad),
                    ConfigError);
}

TEST_CASE("combined_trajectory weights are normalized and inits on one trajectory are reproduced") {
    const auto p = ode(mat2(-0.4, 0.3, -0.2, -0.1), {0.05, 0.1});
    const InitialCondition<double> origin{0.0, {1.0, -0.5}};
    std::vector<InitialCondition<double>> inits;
    for (double k : {0.0, 0.4, 0.9, 1.3, 2.2, 3.0}) inits.push_back({k, solve_ivp(p, origin, k)});
    const std::vector<double> times{-0.5, 0.0, 0.7, 1.3, 2.5, 4.0};
    const auto est = combined_trajectory(p, std::span<const InitialCondition<double>>(inits),
                                         std::span<const double>(times));
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const auto truth = solve_ivp(p, origin, times[ti]);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(std::abs(est.values[ti][i] - truth[i]) < 1e-8);
            double total = 0.0;
            for (const auto& w : est.weights[ti]) total += w[i];
            CHECK(std::abs(total - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("combined_trajectory preconditions") {
    const auto p = ode(mat2(0, 0, 0, 0));
    const std::vector<InitialCondition<double>> none;
    const std::vector<double> t{1.0};
    CHECK_THROWS_AS(combined_trajectory(p, std::span<const InitialCondition<double>>(none), std::span<const double>(t)),
                    PreconditionError);
    const std::vector<InitialCondition<double>> wrong{{0.0, {1.0}}};
    CHECK_THROWS_AS(combined_trajectory(p, std::span<const InitialCondition<double>>(wrong), std::span<const double>(t)),
                    ConfigError);
}

TEST_CASE("trajectory gradient through the series exponential matches finite differences") {
    // Parameters: A (4), c (2), two initial values (4).
    ParamStore params;
    Tensor<double> A(2, 2);
    A.data = {-0.3, 0.5, -0.4, 0.1};
    params.add("A", A);
    Tensor<double> c(2, 1);
    c.data = {0.2, -0.1};
    params.add("c", c);
    Tensor<double> m(4, 1);
    m.data = {0.7, -0.2, 0.1, 0.4};
    params.add("mu", m);
    const std::vector<double> times{0.0, 0.8, 1.5, 2.5};

    WeightTable weights;
    auto loss = [&](const auto& ps, const WeightTable* fixed, WeightTable* used) {
        using T = std::decay_t<decltype(ps.at("A").data[0])>;
        OdeParams<T> p;
        p.A = ps.at("A");
        p.c = ps.at("c").data;
        const auto& mu = ps.at("mu").data;
        const std::vector<InitialCondition<T>> inits{{0.0, {mu[0], mu[1]}}, {0.8, {mu[2], mu[3]}}, {1.5, {mu[0], mu[3]}}};
        const auto est = combined_trajectory(p, std::span<const InitialCondition<T>>(inits),
                                             std::span<const double>(times), false, fixed);
        if (used) *used = est.weights;
        std::vector<T> flat;
        for (const auto& v : est.values) flat.insert(flat.end(), v.begin(), v.end());
        return sum_of_squares(std::span<const T>(flat));
    };
    const auto exact = compute_gradient([&](Tape&, const VarParams& vp) { return loss(vp, nullptr, &weights); }, params);
    const auto fd = testing::central_difference([&](const ParamStore& p) { return loss(p, &weights, nullptr); }, params,
                                                1e-6);
    for (std::size_t g = 0; g < fd.group_count(); ++g)
        for (std::size_t i = 0; i < fd.group(g).data.size(); ++i)
            CHECK(testing::relative_error(exact.gradient.group(g).data[i], fd.group(g).data[i], 1e-3) < 1e-6);
}
