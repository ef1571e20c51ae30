#pragma once

#include <variant>
#include <vector>

#include "wzw/types.hpp"

namespace wzw::hn {

// Harder-Narasimhan slopes, sorted non-decreasing.  The base Fubini-Study
// form has unit mass, so the slope of O(a) over P^1 is a itself.
using SlopeVector = std::vector<double>;

struct DiscreteMeasure {
    struct Atom {
        double location;
        double weight;
    };
    std::vector<Atom> atoms;  // locations non-decreasing, weights >= 0, sum 1

    static DiscreteMeasure point_mass(double x) { return DiscreteMeasure{{{x, 1.0}}}; }
    void validate() const;
};

// phi_* dlambda for phi(x) = sum x_i mu_i on the normalized (r-1)-simplex.
// The density is the B-spline with knots mu; support [mu_min, mu_max].
struct SimplexPushforwardMeasure {
    SlopeVector mu;  // sorted non-decreasing, r >= 1

    bool is_point_mass() const;
    double density(double y) const;  // M-spline recursion; 0 outside support
    double cdf(double y) const;
    void validate() const;
};

using Measure = std::variant<DiscreteMeasure, SimplexPushforwardMeasure>;

// Sym^k(+O(a_i)) = +_{|alpha|=k} O(alpha . a): the slope multiset, sorted.
SlopeVector split_sym_slopes(const std::vector<int>& degrees, int k);

// eta_k: atoms at mu_i/k with equal weights.
DiscreteMeasure eta_k(const SlopeVector& slopes, int k);

// Limiting measure for the projectivized split bundle.
SimplexPushforwardMeasure eta_limit(const std::vector<int>& degrees);

// p-th moment; exact (complete homogeneous symmetric polynomial formula for
// the simplex pushforward).  p <= 12.
double moment(const Measure& m, int p);

// integral of |x - t| dm(x); exact for discrete and r = 2, adaptive
// Gauss-Legendre on the spline density split at the knots otherwise.
double abs_moment(const Measure& m, double t);

// CDF distance integral |F1 - F2| over the union support; exact on merged
// breakpoints for discrete / r = 2 pairs, quadrature otherwise.
double wasserstein1(const Measure& m1, const Measure& m2);

// RHS of the main lower bound: (n+1) * abs_moment(eta_limit, t), n = r-1.
double rhs_main_theorem(const std::vector<int>& degrees, double t);

// (n+1) * int_{x>=0} x d eta^HN = (n+1) (moment_1 + abs_moment(0)) / 2.
double hhat0_formula(const std::vector<int>& degrees);

// Exact section counting: r!/k^r * dim H^q(Y, L^k) for k = 1..k_max,
// via h^0(P^1, O(d)) = max(d+1, 0), h^1 = max(-d-1, 0) over the split
// decomposition of E_k.
std::vector<double> hhat_exact(const std::vector<int>& degrees, int q, int k_max);

double measure_min(const Measure& m);
double measure_max(const Measure& m);

}  // namespace wzw::hn
