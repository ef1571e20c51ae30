#include "wzw/flagcore.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "wzw/multiindex.hpp"
#include "wzw/tolerances.hpp"

namespace wzw::flag {

// ---------------------------------------------------------------- products

HermitianProduct::HermitianProduct(Mat gram) {
    if (gram.rows() == 0 || gram.rows() != gram.cols())
        throw ValidationError("HermitianProduct: Gram matrix must be square and nonempty");
    const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
    if ((gram - gram.adjoint()).cwiseAbs().maxCoeff() > tol::hermitian_sym * scale)
        throw ValidationError("HermitianProduct: Gram matrix is not Hermitian");
    gram_ = lin::hermitize(gram);
    Eigen::SelfAdjointEigenSolver<Mat> es(gram_, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > tol::pd_relative * hi))
        throw ValidationError("HermitianProduct: Gram matrix is not positive definite");
}

HermitianProduct HermitianProduct::identity(int dim) {
    return HermitianProduct(Mat::Identity(dim, dim));
}

const Mat& HermitianProduct::chol_lower() const {
    if (!chol_) chol_ = lin::cholesky(gram_);
    return *chol_;
}

WarnHandler& warn_handler() {
    static WarnHandler handler = [](const std::string& msg) {
        std::cerr << "[wzw] warning: " << msg << "\n";
    };
    return handler;
}

// -------------------------------------------------------------- filtrations

Filtration::Filtration(std::vector<double> jumps, std::vector<Mat> subspaces) {
    if (jumps.empty() || jumps.size() != subspaces.size())
        throw ValidationError("Filtration: jumps and subspaces must be nonempty, same length");
    // merge coincident jump values: keep the larger subspace (the earlier one)
    std::vector<double> js;
    std::vector<Mat> ss;
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        if (!js.empty() && jumps[i] <= js.back()) {
            if (jumps[i] == js.back()) {
                warn_handler()("Filtration: coincident jump values merged at " +
                               std::to_string(jumps[i]));
                continue;  // earlier (larger) subspace wins
            }
            throw ValidationError("Filtration: jumps must be strictly increasing");
        }
        js.push_back(jumps[i]);
        ss.push_back(subspaces[i]);
    }
    const int dim = static_cast<int>(ss[0].rows());
    if (static_cast<int>(ss[0].cols()) != dim)
        throw ValidationError("Filtration: first subspace must span the full space");
    int prev_dim = dim + 1;
    for (std::size_t i = 0; i < ss.size(); ++i) {
        if (static_cast<int>(ss[i].rows()) != dim)
            throw ValidationError("Filtration: inconsistent ambient dimension");
        const int d = static_cast<int>(ss[i].cols());
        if (d < 1 || d >= prev_dim)
            throw ValidationError("Filtration: subspace dimensions must strictly decrease");
        if (static_cast<int>(lin::col_space(ss[i], 1e-12).cols()) != d)
            throw ValidationError("Filtration: degenerate subspace basis at level " +
                                  std::to_string(i));
        if (i > 0 && !lin::contained_in(ss[i], ss[i - 1], tol::membership))
            throw ValidationError("Filtration: subspaces are not nested");
        prev_dim = d;
    }
    jumps_ = std::move(js);
    subspaces_ = std::move(ss);
}

Filtration Filtration::coordinate_flag(int dim, std::vector<double> jumps) {
    if (static_cast<int>(jumps.size()) > dim)
        throw ValidationError("coordinate_flag: more jumps than dimensions");
    std::vector<Mat> subs;
    const int q = static_cast<int>(jumps.size());
    for (int i = 0; i < q; ++i) {
        Mat b = Mat::Zero(dim, dim - i);
        for (int j = 0; j < dim - i; ++j) b(i + j, j) = 1.0;
        subs.push_back(b);
    }
    return Filtration(std::move(jumps), std::move(subs));
}

Filtration Filtration::trivial(int dim, double jump) {
    return Filtration({jump}, {Mat::Identity(dim, dim)});
}

std::vector<double> Filtration::weight_spectrum() const {
    std::vector<double> w;
    const int q = levels();
    for (int i = 0; i < q; ++i) {
        const int next = (i + 1 < q) ? dim_at_level(i + 1) : 0;
        for (int m = 0; m < dim_at_level(i) - next; ++m) w.push_back(jumps_[i]);
    }
    std::sort(w.begin(), w.end());
    return w;
}

LinearSurjection::LinearSurjection(Mat matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() < 1 || matrix_.rows() > matrix_.cols())
        throw ValidationError("LinearSurjection: need 1 <= dim Q <= dim V");
    if (static_cast<int>(lin::col_space(matrix_.adjoint(), 1e-12).cols()) !=
        static_cast<int>(matrix_.rows()))
        throw ValidationError("LinearSurjection: matrix is not of full row rank");
}

LinearSurjection LinearSurjection::identity(int dim) {
    return LinearSurjection(Mat::Identity(dim, dim));
}

// ------------------------------------------------------------ adapted bases

namespace {

// H-orthogonal projector onto span(basis).
Mat h_projector(const Mat& basis, const Mat& gram) {
    const Mat m = basis.adjoint() * gram * basis;
    return basis * m.ldlt().solve(basis.adjoint() * gram);
}

}  // namespace

AdaptedBasis adapted_basis(const HermitianProduct& h, const Filtration& f) {
    const int r = f.ambient_dim();
    if (h.dim() != r) throw ValidationError("adapted_basis: dimension mismatch");
    const Mat& g = h.gram();
    const int q = f.levels();

    // built deepest-first; chosen[j] has weight weights[j]
    std::vector<Vec> chosen;
    std::vector<double> weights;
    auto h_inner = [&](const Vec& a, const Vec& b) { return (a.adjoint() * g * b)(0, 0); };

    for (int level = q - 1; level >= 0; --level) {
        const Mat& sub = f.subspaces()[level];
        const int target_dim = static_cast<int>(sub.cols());
        // candidates: H-orthogonal projections of the reference basis onto the
        // level subspace, taken in reference-basis order (completion rule).
        const Mat proj = h_projector(sub, g);
        for (int cand = 0; cand < r && static_cast<int>(chosen.size()) < target_dim; ++cand) {
            Vec v = proj.col(cand);  // projection of e_cand
            for (const Vec& e : chosen) v -= e * h_inner(e, v);
            // second GS pass for numerical orthogonality
            for (const Vec& e : chosen) v -= e * h_inner(e, v);
            const double nrm = std::sqrt(std::abs(std::real(h_inner(v, v))));
            if (nrm > 1e-9) {
                chosen.push_back(v / nrm);
                weights.push_back(f.jumps()[level]);
            }
        }
        if (static_cast<int>(chosen.size()) != target_dim)
            throw ValidationError("adapted_basis: degenerate filtration bases at level " +
                                  std::to_string(level));
    }
    // reorder to non-decreasing weight (shallowest first)
    AdaptedBasis out;
    out.basis = Mat(r, r);
    out.weights.resize(r);
    for (int i = 0; i < r; ++i) {
        out.basis.col(i) = chosen[r - 1 - i];
        out.weights[i] = weights[r - 1 - i];
    }
    return out;
}

Mat weight_operator(const HermitianProduct& h, const Filtration& f) {
    const AdaptedBasis ab = adapted_basis(h, f);
    const int r = h.dim();
    Mat d = Mat::Zero(r, r);
    for (int i = 0; i < r; ++i) d(i, i) = ab.weights[i];
    const Mat a = ab.basis * d * ab.basis.inverse();
    // clean up roundoff: project back to the H-Hermitian matrices
    const Mat& g = h.gram();
    return g.llt().solve(lin::hermitize(g * a));
}

HermitianProduct geodesic_ray(const HermitianProduct& h, const Filtration& f, double s) {
    if (!std::isfinite(s)) throw ValidationError("geodesic_ray: s must be finite");
    if (s == 0.0) return h;
    const AdaptedBasis ab = adapted_basis(h, f);
    const int r = h.dim();
    Mat d = Mat::Zero(r, r);
    for (int i = 0; i < r; ++i) d(i, i) = std::exp(-s * ab.weights[i]);
    // gram(H_s) = E^{-H} diag(e^{-s w}) E^{-1} with E the adapted basis
    const Mat einv = ab.basis.inverse();
    return HermitianProduct(lin::hermitize(einv.adjoint() * d * einv));
}

HermitianProduct geodesic_segment(const HermitianProduct& h0, const HermitianProduct& h1,
                                  double s) {
    if (h0.dim() != h1.dim()) throw ValidationError("geodesic_segment: dimension mismatch");
    if (s == 0.0) return h0;
    if (s == 1.0) return h1;
    const Mat& l = h0.chol_lower();
    Mat b = l.triangularView<Eigen::Lower>().solve(h1.gram());
    b = l.triangularView<Eigen::Lower>().solve(b.adjoint()).adjoint();
    Eigen::SelfAdjointEigenSolver<Mat> es(lin::hermitize(b));
    RealVec d = es.eigenvalues();
    for (int i = 0; i < d.size(); ++i) d[i] = std::pow(d[i], s);
    const Mat mid = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
    return HermitianProduct(lin::hermitize(l * mid * l.adjoint()));
}

double na_weight(const Filtration& f, const Vec& v) {
    if (v.norm() == 0.0) return std::numeric_limits<double>::infinity();
    for (int i = f.levels() - 1; i >= 0; --i) {
        if (lin::contained_in(v, f.subspaces()[i], tol::membership)) return f.jumps()[i];
    }
    throw ValidationError("na_weight: vector not in the full space (dimension mismatch?)");
}

// ---------------------------------------------------------------- quotients

HermitianProduct quotient_metric(const HermitianProduct& h, const LinearSurjection& p) {
    const Mat& pm = p.matrix();
    if (p.domain_dim() != h.dim()) throw ValidationError("quotient_metric: dimension mismatch");
    const Mat ginv_pH = h.gram().llt().solve(pm.adjoint());
    const Mat core = pm * ginv_pH;  // P G^{-1} P^H
    return HermitianProduct(lin::hermitize(core).llt().solve(Mat::Identity(core.rows(), core.rows())));
}

Filtration quotient_filtration(const Filtration& f, const LinearSurjection& p) {
    if (p.domain_dim() != f.ambient_dim())
        throw ValidationError("quotient_filtration: dimension mismatch");
    const int q = f.levels();
    std::vector<double> jumps;
    std::vector<Mat> subs;
    int deeper_rank = 0;
    // deepest level first: its image carries the largest jump value
    for (int i = q - 1; i >= 0; --i) {
        const Mat image = lin::col_space(p.matrix() * f.subspaces()[i], 1e-12);
        if (static_cast<int>(image.cols()) > deeper_rank) {
            jumps.push_back(f.jumps()[i]);
            subs.push_back(image);
            deeper_rank = static_cast<int>(image.cols());
        }
    }
    std::reverse(jumps.begin(), jumps.end());
    std::reverse(subs.begin(), subs.end());
    return Filtration(std::move(jumps), std::move(subs));
}

// ----------------------------------------------------------- symmetric power

HermitianProduct sym_metric(const HermitianProduct& h, int power) {
    if (power < 1) throw ValidationError("sym_metric: power must be >= 1");
    const int r = h.dim();
    const MultiIndexTable table(r, power);
    const int n = table.size();
    const Mat& g = h.gram();

    bool diagonal = true;
    for (int i = 0; i < r && diagonal; ++i)
        for (int j = 0; j < r; ++j)
            if (i != j && std::abs(g(i, j)) > 0.0) {
                diagonal = false;
                break;
            }

    Mat out = Mat::Zero(n, n);
    double lfact = 1.0;
    for (int i = 2; i <= power; ++i) lfact *= i;
    if (diagonal) {
        for (int a = 0; a < n; ++a) {
            const MultiIndex& alpha = table.list[a];
            double fact = 1.0;
            Complex prod(1, 0);
            for (int i = 0; i < r; ++i) {
                for (int m = 2; m <= alpha[i]; ++m) fact *= m;
                for (int m = 0; m < alpha[i]; ++m) prod *= g(i, i);
            }
            out(a, a) = prod * (fact / lfact);
        }
        return HermitianProduct(out);
    }
    // dense: <X^a, X^b> = per(G[rows(a), cols(b)]) / l!
    auto expand = [&](const MultiIndex& a) {
        std::vector<int> idx;
        for (int i = 0; i < r; ++i)
            for (int m = 0; m < a[i]; ++m) idx.push_back(i);
        return idx;
    };
    for (int a = 0; a < n; ++a) {
        const auto rows = expand(table.list[a]);
        for (int b = a; b < n; ++b) {
            const auto cols = expand(table.list[b]);
            Mat sel(power, power);
            for (int i = 0; i < power; ++i)
                for (int j = 0; j < power; ++j) sel(i, j) = g(rows[i], cols[j]);
            const Complex val = lin::permanent(sel) / lfact;
            out(a, b) = val;
            out(b, a) = std::conj(val);
        }
    }
    return HermitianProduct(lin::hermitize(out));
}

Mat sym_operator(const Mat& a, int power, const HermitianProduct& h) {
    const int r = h.dim();
    if (a.rows() != r || a.cols() != r) throw ValidationError("sym_operator: dimension mismatch");
    const Mat ga = h.gram() * a;
    const double scale = std::max(1.0, ga.cwiseAbs().maxCoeff());
    if ((ga - ga.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw ValidationError("sym_operator: operator is not Hermitian w.r.t. H");
    const MultiIndexTable table(r, power);
    const int n = table.size();
    Mat out = Mat::Zero(n, n);
    // derivation: D_A(X^gamma) = sum_j gamma_j X^{gamma - e_j} sum_i A_{ij} X_i
    for (int c = 0; c < n; ++c) {
        MultiIndex gamma = table.list[c];
        for (int j = 0; j < r; ++j) {
            if (gamma[j] == 0) continue;
            for (int i = 0; i < r; ++i) {
                if (a(i, j) == Complex(0, 0)) continue;
                MultiIndex target = gamma;
                target[j] -= 1;
                target[i] += 1;
                out(table.index_of(target), c) += double(gamma[j]) * a(i, j);
            }
        }
    }
    return out;
}

Filtration sym_filtration(const Filtration& f, int power) {
    const int r = f.ambient_dim();
    // flag-adapted basis (metric only fixes the completion; weights do not
    // depend on it)
    const AdaptedBasis ab = adapted_basis(HermitianProduct::identity(r), f);
    const MultiIndexTable table(r, power);
    const int n = table.size();

    // expand b^{(x) alpha} in the reference monomial basis by iterated
    // polynomial multiplication
    std::vector<MultiIndexTable> tables;
    tables.reserve(power + 1);
    for (int d = 0; d <= power; ++d) tables.emplace_back(r, d);
    Mat columns = Mat::Zero(n, n);
    std::vector<double> col_weight(n);
    for (int c = 0; c < n; ++c) {
        const MultiIndex& alpha = table.list[c];
        std::vector<Complex> poly{Complex(1, 0)};  // degree-0 coefficients
        int deg = 0;
        for (int i = 0; i < r; ++i) {
            for (int m = 0; m < alpha[i]; ++m) {
                const MultiIndexTable& from = tables[deg];
                const MultiIndexTable& to = tables[deg + 1];
                std::vector<Complex> next(to.size(), Complex(0, 0));
                for (int t = 0; t < from.size(); ++t) {
                    if (poly[t] == Complex(0, 0)) continue;
                    for (int v = 0; v < r; ++v) {
                        if (ab.basis(v, i) == Complex(0, 0)) continue;
                        MultiIndex m2 = from.list[t];
                        m2[v] += 1;
                        next[to.index_of(m2)] += poly[t] * ab.basis(v, i);
                    }
                }
                poly = std::move(next);
                ++deg;
            }
        }
        for (int t = 0; t < n; ++t) columns(t, c) = poly[t];
        col_weight[c] = dot(alpha, ab.weights);
    }

    std::vector<double> distinct = col_weight;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end(),
                               [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                   distinct.end());
    std::vector<double> jumps;
    std::vector<Mat> subs;
    for (double lvl : distinct) {
        std::vector<int> take;
        for (int c = 0; c < n; ++c)
            if (col_weight[c] >= lvl - 1e-12) take.push_back(c);
        Mat basis(n, static_cast<int>(take.size()));
        for (std::size_t j = 0; j < take.size(); ++j) basis.col(j) = columns.col(take[j]);
        jumps.push_back(lvl);
        subs.push_back(std::move(basis));
    }
    return Filtration(std::move(jumps), std::move(subs));
}

Mat restrict_operator(const Mat& a, const LinearSurjection& p, const HermitianProduct& h) {
    if (p.domain_dim() != h.dim())
        throw ValidationError("restrict_operator: dimension mismatch");
    const Mat ga = h.gram() * a;
    const double scale = std::max(1.0, ga.cwiseAbs().maxCoeff());
    if ((ga - ga.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw ValidationError("restrict_operator: operator is not Hermitian w.r.t. H");
    const Mat& pm = p.matrix();
    const Mat ginv_pH = h.gram().llt().solve(pm.adjoint());
    const Mat core = lin::hermitize(pm * ginv_pH);
    // sigma = G^{-1} P^H (P G^{-1} P^H)^{-1}: the H-orthogonal section of p
    const Mat sigma = ginv_pH * core.llt().solve(Mat::Identity(core.rows(), core.rows()));
    Mat aq = pm * a * sigma;
    // Hermitize w.r.t. the quotient metric
    const Mat gq = core.llt().solve(Mat::Identity(core.rows(), core.rows()));
    return gq.llt().solve(lin::hermitize(gq * aq));
}

double trace_abs_norm(const Mat& a, const HermitianProduct& h) {
    if (a.rows() != h.dim() || a.cols() != h.dim())
        throw ValidationError("trace_abs_norm: dimension mismatch");
    return lin::trace_abs(a, h.gram());
}

bool dominates(const Filtration& f1, const Filtration& f2) {
    if (f1.ambient_dim() != f2.ambient_dim())
        throw ValidationError("dominates: ambient dimension mismatch");
    // w_{F1} <= w_{F2}  <=>  F1_t subset F2_t for all t; check at F1's jumps.
    for (int i = 0; i < f1.levels(); ++i) {
        const double t = f1.jumps()[i];
        // F2 value at t: subspace of the smallest F2-jump >= t
        int level2 = -1;
        for (int j = 0; j < f2.levels(); ++j) {
            if (f2.jumps()[j] >= t - 1e-12) {
                level2 = j;
                break;
            }
        }
        if (level2 < 0) return false;  // F2_t = {0} but F1_t is not
        if (!lin::contained_in(f1.subspaces()[i], f2.subspaces()[level2], tol::membership))
            return false;
    }
    return true;
}

}  // namespace wzw::flag
