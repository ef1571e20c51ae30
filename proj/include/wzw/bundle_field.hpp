#pragma once

#include <functional>
#include <memory>

#include "wzw/fibered_form.hpp"
#include "wzw/flagcore.hpp"
#include "wzw/model.hpp"
#include "wzw/parallel.hpp"

namespace wzw::geom {

// Field of Hermitian products on E_k = Sym^k E over the base, stored in the
// monomial frame.  Torus-invariant fields are diagonal and kept in log scale
// (geodesic rays shift the logs, so arbitrarily long ray times stay finite).
class BundleMetricField {
  public:
    using LogDiagFn = std::function<RealVec(double /*u*/)>;
    using DenseFn = std::function<Mat(double /*u*/)>;

    static BundleMetricField diagonal(std::shared_ptr<const SplitModel> model,
                                      std::shared_ptr<const RadialGrid> grid, int k, LogDiagFn fn);
    static BundleMetricField dense(std::shared_ptr<const SplitModel> model,
                                   std::shared_ptr<const RadialGrid> grid, int k, DenseFn fn);

    int k() const { return k_; }
    int rank() const { return rank_; }
    bool is_diagonal() const { return static_cast<bool>(log_diag_fn_); }
    const SplitModel& model() const { return *model_; }
    const RadialGrid& grid() const { return *grid_; }
    std::shared_ptr<const SplitModel> model_ptr() const { return model_; }
    std::shared_ptr<const RadialGrid> grid_ptr() const { return grid_; }

    RealVec log_diag(double u) const;  // diagonal fields only
    Mat gram(double u) const;          // materialized Gram (either kind)

  private:
    std::shared_ptr<const SplitModel> model_;
    std::shared_ptr<const RadialGrid> grid_;
    int k_ = 1;
    int rank_ = 0;
    LogDiagFn log_diag_fn_;
    DenseFn dense_fn_;

    void validate_at_nodes() const;
};

// Harder-Narasimhan filtration of E_k (by monomial subbundles; jumps are the
// distinct slopes, increasing).
flag::Filtration hn_filtration(const SplitModel& model, int k);

// L^2 products of the monomial sections against the fiberwise volume
// c_1(L, h)^n of `form` (unit fiber mass) with weight e^{-level.phi/k}.
// Torus invariance makes the output diagonal.  Construction re-evaluates on a
// doubled fiber rule and rejects relative changes above tol::hilb_refine_rel.
BundleMetricField hilb_metric(const SplitModel& model, const FiberedForm& form, int level,
                              par::ExecPolicy policy = par::default_policy(),
                              bool validate = true);

// Fubini-Study potential of a (diagonal) metric field:
// phi(u, x) = log sum_alpha x^alpha / h_alpha(u).  Power = field.k().
FiberedForm fs_potential(const BundleMetricField& field, bool check_positivity = true);

// (i/2pi) R wedge-contracted against omega_B: one Hermitian matrix (monomial
// frame) per base node; centered differences in the log-radial coordinate.
std::vector<Mat> bundle_curvature(const BundleMetricField& field,
                                  par::ExecPolicy policy = par::default_policy());
Mat curvature_density_at(const BundleMetricField& field, double u);

struct HymResult {
    double op_norm;     // eq-HYM flavor: integral of the operator norm
    double trace_norm;  // trace-norm variant
};
HymResult hym_functional(const BundleMetricField& field, double t,
                         par::ExecPolicy policy = par::default_policy());

// Direct sum of FS^{alpha.a} metrics with the simplex Beta normalization
// constants (so equal degrees reproduce hilb_metric of the reference form);
// an exact critical Hermitian structure for the split model.
BundleMetricField critical_metric(std::shared_ptr<const SplitModel> model,
                                  std::shared_ptr<const RadialGrid> grid, int k);

struct DeltaApprox {
    bool within;
    double residual;  // operator-norm L^1 distance to the HN weight operator
};
DeltaApprox is_delta_approx(const BundleMetricField& field, double delta,
                            par::ExecPolicy policy = par::default_policy());

// Geodesic ray of metrics associated with the HN filtration, applied
// pointwise over the base.
BundleMetricField ray_field(const BundleMetricField& field, double s);

// Quotient of Sym^l through the multiplication map Sym^l E_k -> E_{kl}
// (merge of monomial exponents), pointwise over the base.
BundleMetricField mult_quotient_metric(const BundleMetricField& field, int l);

struct RatioInterval {
    double lo;
    double hi;
};
// Eigenvalue range over base nodes of [Sym^l H] against
// Hilb_{kl}(FS(H)^{1/k}) scaled by n!/(k l^n)   (-> 1 as l grows).
RatioInterval quotient_vs_hilb_ratio(const SplitModel& model, const BundleMetricField& field,
                                     int k, int l,
                                     par::ExecPolicy policy = par::default_policy());

// FS(ray_field(H0, s))^{1/k} as a fibered form (the minimizing sequence).
FiberedForm dequantize(const SplitModel& model, int k, double s, const BundleMetricField& h0);

struct HymOnHilbResult {
    double trace_normalized;  // (1/(k N_k)) HYM_{tk}(E_k, Hilb_k(h)) trace flavor
    double op_normalized;
};
HymOnHilbResult hym_on_hilb(const SplitModel& model, const FiberedForm& hpot, int k, double t,
                            par::ExecPolicy policy = par::default_policy());

// Gram of Hilb_k(FS(H)^{1/k}, eta) with eta the unit-mass reference
// Fubini-Study fiber volume, at one base node (Lemma "H >= Hilb(FS(H))"
// test).  Diagonal fields: any rank; dense fields: rank 2 only (angular
// quadrature).
Mat fs_hilb_roundtrip_gram(const BundleMetricField& field, double u, int theta_nodes = 128);

}  // namespace wzw::geom
