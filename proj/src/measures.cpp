#include "wzw/measures.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "wzw/multiindex.hpp"
#include "wzw/quadrature.hpp"
#include "wzw/tolerances.hpp"

namespace wzw::hn {

void DiscreteMeasure::validate() const {
    if (atoms.empty()) throw ValidationError("DiscreteMeasure: no atoms");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].weight < 0) throw ValidationError("DiscreteMeasure: negative weight");
        if (i > 0 && atoms[i].location < atoms[i - 1].location)
            throw ValidationError("DiscreteMeasure: atoms not sorted");
        total += atoms[i].weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("DiscreteMeasure: mass != 1");
}

void SimplexPushforwardMeasure::validate() const {
    if (mu.empty()) throw ValidationError("SimplexPushforwardMeasure: empty slope vector");
    if (!std::is_sorted(mu.begin(), mu.end()))
        throw ValidationError("SimplexPushforwardMeasure: slopes not sorted");
}

bool SimplexPushforwardMeasure::is_point_mass() const {
    return mu.size() == 1 || mu.front() == mu.back();
}

double SimplexPushforwardMeasure::density(double y) const {
    const int r = static_cast<int>(mu.size());
    if (is_point_mass() || r < 2) return 0.0;
    if (y < mu.front() || y >= mu.back()) return 0.0;
    // Cox-de-Boor recursion for the normalized M-spline of order r-1
    // (density of a uniform convex combination of the knots).
    std::vector<double> m(r - 1, 0.0);
    for (int i = 0; i + 1 < r; ++i) {
        const double lo = mu[i], hi = mu[i + 1];
        m[i] = (hi > lo && y >= lo && y < hi) ? 1.0 / (hi - lo) : 0.0;
    }
    for (int k = 2; k <= r - 1; ++k) {
        for (int i = 0; i + k < r; ++i) {
            const double lo = mu[i], hi = mu[i + k];
            if (hi > lo)
                m[i] = (double(k) / ((k - 1) * (hi - lo))) *
                       ((y - lo) * m[i] + (hi - y) * m[i + 1]);
            else
                m[i] = 0.0;
        }
    }
    return m[0];
}

double SimplexPushforwardMeasure::cdf(double y) const {
    if (is_point_mass()) return y >= mu.front() ? 1.0 : 0.0;
    if (y <= mu.front()) return 0.0;
    if (y >= mu.back()) return 1.0;
    // integrate the per-interval polynomial density exactly
    const int r = static_cast<int>(mu.size());
    const int gl_order = r / 2 + 1;
    const auto base = quad::gauss_legendre(gl_order);
    double acc = 0.0;
    for (int i = 0; i + 1 < r; ++i) {
        const double lo = mu[i];
        const double hi = std::min(mu[i + 1], y);
        if (hi <= lo) {
            if (mu[i + 1] > y) break;
            continue;
        }
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t g = 0; g < base.nodes.size(); ++g)
            acc += half * base.weights[g] * density(mid + half * base.nodes[g]);
        if (mu[i + 1] > y) break;
    }
    return std::min(acc, 1.0);
}

SlopeVector split_sym_slopes(const std::vector<int>& degrees, int k) {
    const int r = static_cast<int>(degrees.size());
    if (r < 1 || k < 1) throw ValidationError("split_sym_slopes: need r >= 1, k >= 1");
    const auto alphas = enumerate_multiindices(r, k);
    SlopeVector out;
    out.reserve(alphas.size());
    for (const auto& a : alphas) {
        double s = 0.0;
        for (int i = 0; i < r; ++i) s += a[i] * degrees[i];
        out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
}

DiscreteMeasure eta_k(const SlopeVector& slopes, int k) {
    if (slopes.empty()) throw ValidationError("eta_k: empty slope vector");
    if (k < 1) throw ValidationError("eta_k: k must be positive");
    DiscreteMeasure m;
    const double w = 1.0 / static_cast<double>(slopes.size());
    for (double s : slopes) m.atoms.push_back({s / k, w});
    std::sort(m.atoms.begin(), m.atoms.end(),
              [](const auto& a, const auto& b) { return a.location < b.location; });
    // merge coincident atoms so breakpoint walks stay exact
    DiscreteMeasure merged;
    for (const auto& a : m.atoms) {
        if (!merged.atoms.empty() && merged.atoms.back().location == a.location)
            merged.atoms.back().weight += a.weight;
        else
            merged.atoms.push_back(a);
    }
    merged.validate();
    return merged;
}

SimplexPushforwardMeasure eta_limit(const std::vector<int>& degrees) {
    if (degrees.empty()) throw ValidationError("eta_limit: empty degree vector");
    SimplexPushforwardMeasure m;
    m.mu.assign(degrees.begin(), degrees.end());
    std::sort(m.mu.begin(), m.mu.end());
    return m;
}

namespace {

// complete homogeneous symmetric polynomial h_p(mu) by dynamic programming
double complete_homogeneous(const SlopeVector& mu, int p) {
    std::vector<double> h(p + 1, 0.0);
    h[0] = 1.0;
    for (double m : mu)
        for (int d = 1; d <= p; ++d) h[d] += m * h[d - 1];
    return h[p];
}

double uniform_abs_moment(double a, double b, double t) {
    // E|X - t| for X uniform on [a,b]
    const double mean = 0.5 * (a + b);
    if (t <= a) return mean - t;
    if (t >= b) return t - mean;
    return ((t - a) * (t - a) + (b - t) * (b - t)) / (2.0 * (b - a));
}

}  // namespace

double moment(const Measure& m, int p) {
    if (p < 0 || p > tol::cap_moment_order)
        throw ValidationError("moment: order must be within [0, " +
                              std::to_string(tol::cap_moment_order) + "]");
    if (p == 0) return 1.0;
    if (std::holds_alternative<DiscreteMeasure>(m)) {
        const auto& d = std::get<DiscreteMeasure>(m);
        double acc = 0.0;
        for (const auto& a : d.atoms) acc += a.weight * std::pow(a.location, p);
        return acc;
    }
    const auto& s = std::get<SimplexPushforwardMeasure>(m);
    const int r = static_cast<int>(s.mu.size());
    // E[(mu . x)^p] = p! (r-1)! / (p+r-1)! * h_p(mu)
    double log_coef = log_factorial(p) + log_factorial(r - 1) - log_factorial(p + r - 1);
    return std::exp(log_coef) * complete_homogeneous(s.mu, p);
}

double abs_moment(const Measure& m, double t) {
    if (std::holds_alternative<DiscreteMeasure>(m)) {
        const auto& d = std::get<DiscreteMeasure>(m);
        double acc = 0.0;
        for (const auto& a : d.atoms) acc += a.weight * std::abs(a.location - t);
        return acc;
    }
    const auto& s = std::get<SimplexPushforwardMeasure>(m);
    if (s.is_point_mass()) return std::abs(s.mu.front() - t);
    if (s.mu.size() == 2) return uniform_abs_moment(s.mu.front(), s.mu.back(), t);
    // adaptive Gauss-Legendre on the spline density, split at knots and at t
    std::vector<double> cuts(s.mu.begin(), s.mu.end());
    if (t > s.mu.front() && t < s.mu.back()) cuts.push_back(t);
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= cuts[i]) continue;
        acc += quad::adaptive(
            [&](double y) { return std::abs(y - t) * s.density(y); }, cuts[i], cuts[i + 1],
            tol::quad_rel, "abs_moment spline segment");
    }
    return acc;
}

double measure_min(const Measure& m) {
    if (std::holds_alternative<DiscreteMeasure>(m))
        return std::get<DiscreteMeasure>(m).atoms.front().location;
    return std::get<SimplexPushforwardMeasure>(m).mu.front();
}

double measure_max(const Measure& m) {
    if (std::holds_alternative<DiscreteMeasure>(m))
        return std::get<DiscreteMeasure>(m).atoms.back().location;
    return std::get<SimplexPushforwardMeasure>(m).mu.back();
}

namespace {

double cdf_of(const Measure& m, double y) {
    if (std::holds_alternative<DiscreteMeasure>(m)) {
        const auto& d = std::get<DiscreteMeasure>(m);
        double acc = 0.0;
        for (const auto& a : d.atoms) {
            if (a.location <= y) acc += a.weight;
        }
        return acc;
    }
    return std::get<SimplexPushforwardMeasure>(m).cdf(y);
}

bool effectively_discrete(const Measure& m) {
    if (std::holds_alternative<DiscreteMeasure>(m)) return true;
    return std::get<SimplexPushforwardMeasure>(m).is_point_mass();
}

DiscreteMeasure as_discrete(const Measure& m) {
    if (std::holds_alternative<DiscreteMeasure>(m)) return std::get<DiscreteMeasure>(m);
    return DiscreteMeasure::point_mass(std::get<SimplexPushforwardMeasure>(m).mu.front());
}

std::vector<double> breakpoints(const Measure& m) {
    std::vector<double> b;
    if (std::holds_alternative<DiscreteMeasure>(m)) {
        for (const auto& a : std::get<DiscreteMeasure>(m).atoms) b.push_back(a.location);
    } else {
        const auto& s = std::get<SimplexPushforwardMeasure>(m);
        b.assign(s.mu.begin(), s.mu.end());
    }
    return b;
}

// exact integral of |F1 - F2| when F1 is a step function and F2 is the
// uniform CDF on [a,b] (linear between breakpoints)
double w1_step_vs_linear(const DiscreteMeasure& d, double a, double b) {
    std::set<double> cuts{a, b};
    for (const auto& at : d.atoms) cuts.insert(at.location);
    std::vector<double> grid(cuts.begin(), cuts.end());
    auto f2 = [&](double x) {
        if (x <= a) return 0.0;
        if (x >= b) return 1.0;
        return (x - a) / (b - a);
    };
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double x0 = grid[i], x1 = grid[i + 1];
        if (x1 <= x0) continue;
        const double f1 = cdf_of(Measure(d), x0);  // constant on (x0, x1)
        const double g0 = f1 - f2(x0), g1 = f1 - f2(x1);
        if (g0 * g1 >= 0) {
            acc += 0.5 * (std::abs(g0) + std::abs(g1)) * (x1 - x0);
        } else {
            const double xc = x0 + (x1 - x0) * std::abs(g0) / (std::abs(g0) + std::abs(g1));
            acc += 0.5 * std::abs(g0) * (xc - x0) + 0.5 * std::abs(g1) * (x1 - xc);
        }
    }
    return acc;
}

}  // namespace

double wasserstein1(const Measure& m1, const Measure& m2) {
    if (effectively_discrete(m1) && effectively_discrete(m2)) {
        const DiscreteMeasure d1 = as_discrete(m1), d2 = as_discrete(m2);
        std::set<double> cuts;
        for (const auto& a : d1.atoms) cuts.insert(a.location);
        for (const auto& a : d2.atoms) cuts.insert(a.location);
        std::vector<double> grid(cuts.begin(), cuts.end());
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i)
            acc += std::abs(cdf_of(m1, grid[i]) - cdf_of(m2, grid[i])) * (grid[i + 1] - grid[i]);
        return acc;
    }
    // discrete vs r = 2 (uniform): exact merged-breakpoint integration
    for (int swap = 0; swap < 2; ++swap) {
        const Measure& a = swap ? m2 : m1;
        const Measure& b = swap ? m1 : m2;
        if (effectively_discrete(a) && std::holds_alternative<SimplexPushforwardMeasure>(b)) {
            const auto& s = std::get<SimplexPushforwardMeasure>(b);
            if (s.mu.size() == 2 && !s.is_point_mass())
                return w1_step_vs_linear(as_discrete(a), s.mu.front(), s.mu.back());
        }
    }
    // general case: adaptive quadrature of |F1 - F2| split at all breakpoints
    std::set<double> cuts;
    for (double x : breakpoints(m1)) cuts.insert(x);
    for (double x : breakpoints(m2)) cuts.insert(x);
    std::vector<double> grid(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (grid[i + 1] <= grid[i]) continue;
        acc += quad::adaptive([&](double y) { return std::abs(cdf_of(m1, y) - cdf_of(m2, y)); },
                              grid[i], grid[i + 1], tol::quad_rel, "wasserstein1 segment", 1e-13);
    }
    return acc;
}

double rhs_main_theorem(const std::vector<int>& degrees, double t) {
    const int n = static_cast<int>(degrees.size()) - 1;
    return (n + 1) * abs_moment(Measure(eta_limit(degrees)), t);
}

double hhat0_formula(const std::vector<int>& degrees) {
    const int n = static_cast<int>(degrees.size()) - 1;
    const Measure m(eta_limit(degrees));
    const double truncated = 0.5 * (moment(m, 1) + abs_moment(m, 0.0));
    return (n + 1) * truncated;
}

std::vector<double> hhat_exact(const std::vector<int>& degrees, int q, int k_max) {
    if (q != 0 && q != 1) throw ValidationError("hhat_exact: q must be 0 or 1");
    if (k_max < 1) throw ValidationError("hhat_exact: k_max must be >= 1");
    const int r = static_cast<int>(degrees.size());
    sym_dimension(r, k_max);  // cap check at the largest level
    std::vector<double> out;
    out.reserve(k_max);
    double log_rfact = log_factorial(r);
    for (int k = 1; k <= k_max; ++k) {
        const SlopeVector slopes = split_sym_slopes(degrees, k);
        double count = 0.0;
        for (double d : slopes)
            count += (q == 0) ? std::max(d + 1.0, 0.0) : std::max(-d - 1.0, 0.0);
        out.push_back(std::exp(log_rfact - r * std::log(double(k))) * count);
    }
    return out;
}

}  // namespace wzw::hn
