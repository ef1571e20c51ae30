#pragma once

#include <functional>
#include <vector>

#include "wzw/types.hpp"

namespace wzw::quad {

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre on [-1,1].
Rule1D gauss_legendre(int n);

// Gauss-Legendre mapped to [a,b]; weights sum to b-a.
Rule1D gauss_legendre_ab(int n, double a, double b);

// Tensor Gauss-Legendre rule on the standard simplex
// {x in R^dim : x_i >= 0, sum x_i <= 1} via the Duffy-type (stick-breaking)
// map, with weights normalized to the uniform PROBABILITY measure
// (they sum to 1 exactly).  dim = 0 yields the single point with weight 1.
struct SimplexRule {
    // node i: coordinates x_1..x_dim (the last barycentric coordinate is
    // 1 - sum and is not stored).
    std::vector<std::vector<double>> nodes;
    std::vector<double> weights;
    int dim = 0;
};
SimplexRule simplex_rule(int dim, int nodes_per_axis);

// Adaptive panel-doubling Gauss-Legendre on [a,b]; throws ConvergenceError
// when the relative tolerance cannot be met.
double adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                const char* what = "integral", double abs_tol = 0.0);

}  // namespace wzw::quad
