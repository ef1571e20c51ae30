#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "wzw/linalg.hpp"
#include "wzw/types.hpp"

namespace wzw::flag {

// Positive-definite Hermitian product on C^dim, stored as the Gram matrix of
// a fixed reference basis: <u,v> = u^H G v (conjugate-linear first slot).
class HermitianProduct {
  public:
    explicit HermitianProduct(Mat gram);
    static HermitianProduct identity(int dim);

    int dim() const { return static_cast<int>(gram_.rows()); }
    const Mat& gram() const { return gram_; }
    const Mat& chol_lower() const;  // cached Cholesky factor

  private:
    Mat gram_;
    mutable std::optional<Mat> chol_;
};

// Warning sink for non-fatal normalizations (tied jumps on input, ...).
using WarnHandler = std::function<void(const std::string&)>;
WarnHandler& warn_handler();

// Decreasing filtration of C^dim: strictly increasing jumps l_1 < ... < l_q,
// subspaces[i] a basis matrix of F_{l_i}; subspaces[0] spans the full space.
// The filtration value function is left-continuous and constant between
// jumps; F_t = {0} for t beyond the last jump.
class Filtration {
  public:
    Filtration(std::vector<double> jumps, std::vector<Mat> subspaces);

    // Flag through the span of the tail of the reference basis:
    // F_{jumps[i]} = span(e_{i+1}, ..., e_dim) with the deepest subspace
    // spanned by the last basis vector.
    static Filtration coordinate_flag(int dim, std::vector<double> jumps);
    // Single jump over the whole space.
    static Filtration trivial(int dim, double jump);

    int ambient_dim() const { return static_cast<int>(subspaces_[0].rows()); }
    int levels() const { return static_cast<int>(jumps_.size()); }
    const std::vector<double>& jumps() const { return jumps_; }
    const std::vector<Mat>& subspaces() const { return subspaces_; }
    int dim_at_level(int i) const { return static_cast<int>(subspaces_[i].cols()); }
    bool is_complete() const { return levels() == ambient_dim(); }

    // Jump values with multiplicity = rank drop, sorted non-decreasing.
    std::vector<double> weight_spectrum() const;

  private:
    std::vector<double> jumps_;
    std::vector<Mat> subspaces_;
};

using WeightSpectrum = std::vector<double>;

// Full-row-rank map C^V -> C^Q in reference bases.
class LinearSurjection {
  public:
    explicit LinearSurjection(Mat matrix);
    static LinearSurjection identity(int dim);
    const Mat& matrix() const { return matrix_; }
    int domain_dim() const { return static_cast<int>(matrix_.cols()); }
    int target_dim() const { return static_cast<int>(matrix_.rows()); }

  private:
    Mat matrix_;
};

// Orthonormal basis adapted to a filtration together with the weight of each
// basis vector (weights non-decreasing, e_i in F_{w_i}, e_i _|_ F_{next jump}).
struct AdaptedBasis {
    Mat basis;                      // columns e_1..e_r
    std::vector<double> weights;    // the completed jump multiset
};

AdaptedBasis adapted_basis(const HermitianProduct& h, const Filtration& f);

// Weight operator A(H,F): H-Hermitian, spectrum = jump multiset of F,
// eigenvectors the adapted basis.
Mat weight_operator(const HermitianProduct& h, const Filtration& f);

// Geodesic ray H_s departing from H associated with F:
// gram(H_s) = gram(H) * exp(-s A(H,F)).
HermitianProduct geodesic_ray(const HermitianProduct& h, const Filtration& f, double s);

// Symmetric-space geodesic segment between two products, endpoints exact.
HermitianProduct geodesic_segment(const HermitianProduct& h0, const HermitianProduct& h1,
                                  double s);

// Non-Archimedean weight w_F(v) = sup{ l : v in F_l }; +infinity for v = 0.
double na_weight(const Filtration& f, const Vec& v);

// Quotient metric: gram ((P G^{-1} P^H)^{-1}) of the minimal-lift norm.
HermitianProduct quotient_metric(const HermitianProduct& h, const LinearSurjection& p);

// Quotient filtration [F] on Q: jump of f = max of w_F over preimages.
Filtration quotient_filtration(const Filtration& f, const LinearSurjection& p);

// Sym^l H in the canonical monomial basis (entries = permanents / l!).
HermitianProduct sym_metric(const HermitianProduct& h, int power);

// Derivation extension of an H-Hermitian endomorphism to Sym^l
// (symmetrization of l A (x) Id (x) ... (x) Id; eigenvalues alpha . lambda).
Mat sym_operator(const Mat& a, int power, const HermitianProduct& h);

// Sym^l F with the non-Archimedean max rule (jump of a monomial in an
// adapted basis = alpha . weights).
Filtration sym_filtration(const Filtration& f, int power);

// Restriction A|_Q = p . A . sigma with sigma the H-orthogonal section of p;
// Hermitian with respect to quotient_metric(h, p).
Mat restrict_operator(const Mat& a, const LinearSurjection& p, const HermitianProduct& h);

// tr|A| with respect to H (Ky Fan / nuclear norm of the whitened matrix).
double trace_abs_norm(const Mat& a, const HermitianProduct& h);

// chi_{F1} >= chi_{F2}, i.e. w_{F1} <= w_{F2}; decided by containment tests.
bool dominates(const Filtration& f1, const Filtration& f2);

}  // namespace wzw::flag
