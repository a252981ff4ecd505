#include "latalign/latent_ode.hpp"

namespace latalign {

double determinant(const Tensor<double>& m) {
    const std::size_t n = m.rows;
    if (m.cols != n) throw ConfigError("determinant: matrix must be square");
    if (n == 1) return m.data[0];
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    Tensor<double> a = m;
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        if (a(pivot, col) == 0.0) return 0.0;
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
            det = -det;
        }
        det *= a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
        }
    }
    return det;
}

namespace {

// cosh(sqrt(q)) and sinh(sqrt(q))/sqrt(q), continued analytically to q < 0.
void hyperbolic_pair(double q, double& ch, double& sh_over_r) {
    if (std::abs(q) < 1e-6) {
        ch = 1.0 + q / 2.0 + q * q / 24.0 + q * q * q / 720.0;
        sh_over_r = 1.0 + q / 6.0 + q * q / 120.0 + q * q * q / 5040.0;
    } else if (q > 0.0) {
        const double r = std::sqrt(q);
        ch = std::cosh(r);
        sh_over_r = std::sinh(r) / r;
    } else {
        const double r = std::sqrt(-q);
        ch = std::cos(r);
        sh_over_r = std::sin(r) / r;
    }
}

}  // namespace

Tensor<double> matrix_exp(const Tensor<double>& m) {
    if (m.rows != m.cols || m.rows == 0) throw ConfigError("matrix_exp: matrix must be square");
    if (m.rows == 1) {
        Tensor<double> out(1, 1, std::exp(m.data[0]));
        if (!std::isfinite(out.data[0])) throw NumericError("matrix_exp: overflow");
        return out;
    }
    if (m.rows != 2) return matrix_exp_series(m);

    // M = s I + N with tr N = 0, so N^2 = q I and exp(M) = e^s (cosh(r) I + sinh(r)/r N), r^2 = q.
    const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    for (double v : m.data)
        if (!std::isfinite(v)) throw NumericError("matrix_exp: non-finite input");
    const double s = 0.5 * (a + d);
    const double half = 0.5 * (a - d);
    const double q = half * half + b * c;
    double ch = 0.0, shr = 0.0;
    hyperbolic_pair(q, ch, shr);
    const double es = std::exp(s);
    Tensor<double> out(2, 2);
    out(0, 0) = es * (ch + shr * half);
    out(0, 1) = es * shr * b;
    out(1, 0) = es * shr * c;
    out(1, 1) = es * (ch - shr * half);
    for (double v : out.data)
        if (!std::isfinite(v)) throw NumericError("matrix_exp: overflow");
    return out;
}

std::vector<double> estimate_solution_variance(const std::vector<std::vector<double>>& solutions,
                                               std::size_t dim) {
    std::vector<double> var(dim, kFallbackVariance);
    const std::size_t n = solutions.size();
    if (n < 2) return var;
    for (std::size_t i = 0; i < dim; ++i) {
        double mean = 0.0;
        for (const auto& s : solutions) mean += s[i];
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (const auto& s : solutions) ss += (s[i] - mean) * (s[i] - mean);
        var[i] = ss / static_cast<double>(n - 1);
    }
    return var;
}

}  // namespace latalign
