#pragma once

#include <functional>
#include <memory>

#include "wzw/model.hpp"
#include "wzw/parallel.hpp"
#include "wzw/types.hpp"

namespace wzw::geom {

// Torus-invariant relatively Kähler (1,1)-form on X, given by the potential
// phi(u, x) of a metric e^{-phi} on L^k evaluated at the normalized fiber
// representative (sum |w_i|^2 = 1).  The potential is stored as grid values
// and as a callable, so finite-difference stencils can be evaluated anywhere.
//
// The full potential in log coordinates (sigma = log(u/(1-u)),
// xi_i = log(y_i / y_r)) is Phi = phi/k + log(1 + sum_i e^{xi_i}); all
// curvature quantities are second derivatives of Phi.
class FiberedForm {
  public:
    using Potential = std::function<double(double /*u*/, const std::vector<double>& /*x*/)>;

    FiberedForm(std::shared_ptr<const SplitModel> model, std::shared_ptr<const RadialGrid> grid,
                int k, Potential potential, bool check_positivity = true);

    int k() const { return k_; }
    const SplitModel& model() const { return *model_; }
    const RadialGrid& grid() const { return *grid_; }
    std::shared_ptr<const SplitModel> model_ptr() const { return model_; }
    std::shared_ptr<const RadialGrid> grid_ptr() const { return grid_; }

    double phi(double u, const std::vector<double>& x) const { return potential_(u, x); }
    // Phi(sigma, xi): power-1 potential in log coordinates, chart w_r = 1
    double log_potential(double sigma, const std::vector<double>& xi) const;

    // full (n+1)x(n+1) Hessian of Phi at a grid point, centered differences
    // with Richardson refinement to tol::fd_target_rel
    RealMat log_hessian(double sigma, const std::vector<double>& xi) const;

    // vertical Monge-Ampere density relative to the reference Fubini-Study
    // fiber volume: det(fiber Hessian) / prod_i x_i at node (u, x)
    double ma_quotient(double u, const std::vector<double>& x) const;

    // cached potential values at the grid nodes (base-major layout)
    const RealMat& grid_values() const { return values_; }

    // number of nodes where the whitened fiber Hessian dipped below the
    // positivity floor (warned, not fatal; genuine negativity throws)
    int degenerate_nodes() const { return degenerate_nodes_; }

  private:
    std::shared_ptr<const SplitModel> model_;
    std::shared_ptr<const RadialGrid> grid_;
    int k_;
    Potential potential_;
    RealMat values_;
    int degenerate_nodes_ = 0;

    void check_positivity_and_charts();
};

// Per-node curvature data of a fibered form (base-major layout:
// entry(i, j) for base node i, fiber node j).
struct CurvatureFields {
    RealMat top_density;       // A = det(Hessian) / (u(1-u) prod_i x_i)
    RealMat vertical_density;  // Q = det(fiber block) / prod_i x_i
    RealMat horizontal_trace;  // A / Q  (the scalar field wedge_{omega_B} omega_H)
};

CurvatureFields line_curvature(const FiberedForm& form,
                               par::ExecPolicy policy = par::default_policy());

struct WzwResult {
    double value;            // integral of |trace - t| . omega^n pi* omega_B . (n+1)
    double signed_integral;  // same without the absolute value
};

// Quadrature of the WZW integrand on the grid; `check` re-evaluates on a
// doubled grid and throws ConvergenceError on disagreement.
WzwResult wzw_functional(const FiberedForm& form, double t,
                         par::ExecPolicy policy = par::default_policy(), bool check = false);

// Identical machinery; named to surface the Hermite-Einstein correspondence.
double hermite_einstein_residual(const FiberedForm& form, double lambda,
                                 par::ExecPolicy policy = par::default_policy());

// Metric on O(1) induced by the direct-sum Fubini-Study metric on E:
// phi(u,x)/k = log sum_i x_i (1-u)^{-a_i}.
FiberedForm reference_potential(std::shared_ptr<const SplitModel> model,
                                std::shared_ptr<const RadialGrid> grid, int k);

}  // namespace wzw::geom
