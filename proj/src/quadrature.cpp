#include "wzw/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace wzw::quad {

Rule1D gauss_legendre(int n) {
    if (n < 1) throw ValidationError("gauss_legendre: n must be >= 1");
    Rule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Newton iteration from the Chebyshev-like initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

Rule1D gauss_legendre_ab(int n, double a, double b) {
    Rule1D base = gauss_legendre(n);
    Rule1D out;
    out.nodes.resize(n);
    out.weights.resize(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        out.nodes[i] = mid + half * base.nodes[i];
        out.weights[i] = half * base.weights[i];
    }
    return out;
}

SimplexRule simplex_rule(int dim, int nodes_per_axis) {
    SimplexRule rule;
    rule.dim = dim;
    if (dim == 0) {
        rule.nodes.push_back({});
        rule.weights.push_back(1.0);
        return rule;
    }
    const Rule1D axis = gauss_legendre_ab(nodes_per_axis, 0.0, 1.0);
    const long total = static_cast<long>(std::pow(static_cast<double>(nodes_per_axis), dim));
    double factorial = 1.0;
    for (int i = 2; i <= dim; ++i) factorial *= i;
    rule.nodes.reserve(total);
    rule.weights.reserve(total);
    std::vector<int> idx(dim, 0);
    for (long flat = 0; flat < total; ++flat) {
        std::vector<double> x(dim);
        double w = factorial;
        double remaining = 1.0;
        for (int d = 0; d < dim; ++d) {
            const double xi = axis.nodes[idx[d]];
            x[d] = xi * remaining;
            // stick-breaking Jacobian contributes one factor of the current
            // remaining mass per axis.
            w *= axis.weights[idx[d]] * remaining;
            remaining *= (1.0 - xi);
        }
        rule.nodes.push_back(std::move(x));
        rule.weights.push_back(w);
        for (int d = dim - 1; d >= 0; --d) {
            if (++idx[d] < nodes_per_axis) break;
            idx[d] = 0;
        }
    }
    return rule;
}

namespace {
double panel_sum(const std::function<double(double)>& f, double a, double b, int panels,
                 const Rule1D& base) {
    double total = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h, mid = lo + 0.5 * h;
        for (std::size_t i = 0; i < base.nodes.size(); ++i)
            total += 0.5 * h * base.weights[i] * f(mid + 0.5 * h * base.nodes[i]);
    }
    return total;
}
}  // namespace

double adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                const char* what, double abs_tol) {
    if (!(b > a)) return 0.0;
    static const Rule1D base = gauss_legendre(16);
    double prev = panel_sum(f, a, b, 1, base);
    for (int panels = 2; panels <= 4096; panels *= 2) {
        const double cur = panel_sum(f, a, b, panels, base);
        const double scale = std::max({std::abs(cur), std::abs(prev), 1e-300});
        if (std::abs(cur - prev) <= rel_tol * scale + abs_tol) return cur;
        prev = cur;
    }
    throw ConvergenceError(std::string("adaptive quadrature failed to converge: ") + what);
}

}  // namespace wzw::quad
