#include "wzw/bundle_field.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wzw/linalg.hpp"
#include "wzw/tolerances.hpp"

namespace wzw::geom {

namespace {

// log of all r barycentric coordinates at a fiber node (n stored + last)
RealVec log_xhat(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    RealVec out(n + 1);
    double xr = 1.0;
    for (int i = 0; i < n; ++i) {
        out[i] = std::log(std::max(x[i], 1e-300));
        xr -= x[i];
    }
    out[n] = std::log(std::max(xr, 1e-300));
    return out;
}

double lse(const RealVec& v) {
    const double m = v.maxCoeff();
    double s = 0.0;
    for (int i = 0; i < v.size(); ++i) s += std::exp(v[i] - m);
    return m + std::log(s);
}

}  // namespace

BundleMetricField BundleMetricField::diagonal(std::shared_ptr<const SplitModel> model,
                                              std::shared_ptr<const RadialGrid> grid, int k,
                                              LogDiagFn fn) {
    BundleMetricField f;
    f.model_ = std::move(model);
    f.grid_ = std::move(grid);
    f.k_ = k;
    f.rank_ = static_cast<int>(f.model_->level(k).table.size());
    f.log_diag_fn_ = std::move(fn);
    f.validate_at_nodes();
    return f;
}

BundleMetricField BundleMetricField::dense(std::shared_ptr<const SplitModel> model,
                                           std::shared_ptr<const RadialGrid> grid, int k,
                                           DenseFn fn) {
    BundleMetricField f;
    f.model_ = std::move(model);
    f.grid_ = std::move(grid);
    f.k_ = k;
    f.rank_ = static_cast<int>(f.model_->level(k).table.size());
    f.dense_fn_ = std::move(fn);
    f.validate_at_nodes();
    return f;
}

RealVec BundleMetricField::log_diag(double u) const {
    if (!is_diagonal())
        throw ValidationError("BundleMetricField: log_diag on a non-diagonal field");
    return log_diag_fn_(u);
}

Mat BundleMetricField::gram(double u) const {
    if (is_diagonal()) {
        const RealVec ld = log_diag_fn_(u);
        Mat g = Mat::Zero(rank_, rank_);
        for (int i = 0; i < rank_; ++i) g(i, i) = std::exp(ld[i]);
        return g;
    }
    return dense_fn_(u);
}

void BundleMetricField::validate_at_nodes() const {
    for (double u : grid_->u_nodes) {
        if (is_diagonal()) {
            const RealVec ld = log_diag_fn_(u);
            if (ld.size() != rank_)
                throw ValidationError("BundleMetricField: wrong diagonal size");
            for (int i = 0; i < ld.size(); ++i)
                if (!std::isfinite(ld[i]))
                    throw ValidationError("BundleMetricField: non-finite log diagonal at u=" +
                                          std::to_string(u));
        } else {
            flag::HermitianProduct probe(dense_fn_(u));  // PD validation
            if (probe.dim() != rank_)
                throw ValidationError("BundleMetricField: wrong Gram size");
        }
    }
}

flag::Filtration hn_filtration(const SplitModel& model, int k) {
    const auto& lvl = model.level(k);
    const int nk = static_cast<int>(lvl.table.size());
    std::vector<double> distinct(lvl.slopes.begin(), lvl.slopes.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<double> jumps;
    std::vector<Mat> subs;
    for (double lvl_slope : distinct) {
        std::vector<int> take;
        for (int i = 0; i < nk; ++i)
            if (lvl.slopes[i] >= lvl_slope) take.push_back(i);
        Mat basis = Mat::Zero(nk, static_cast<int>(take.size()));
        for (std::size_t j = 0; j < take.size(); ++j) basis(take[j], static_cast<int>(j)) = 1.0;
        jumps.push_back(lvl_slope);
        subs.push_back(std::move(basis));
    }
    return flag::Filtration(std::move(jumps), std::move(subs));
}

// ------------------------------------------------------------------- Hilb

namespace {

RealVec hilb_log_diag_rule(const SplitModel& model, const FiberedForm& form, int level, double u,
                           const quad::SimplexRule& rule) {
    const auto& lvl = model.level(level);
    const int nk = static_cast<int>(lvl.table.size());
    const int nf = static_cast<int>(rule.nodes.size());
    const double power_ratio = double(level) / form.k();
    RealVec acc_max = RealVec::Constant(nk, -1e300);
    RealMat terms(nk, nf);
    for (int j = 0; j < nf; ++j) {
        const auto& x = rule.nodes[j];
        const RealVec lx = log_xhat(x);
        const double phi = form.phi(u, x);
        const double q = std::max(form.ma_quotient(u, x), 1e-300);
        const double base = std::log(rule.weights[j]) - power_ratio * phi + std::log(q);
        for (int a = 0; a < nk; ++a) {
            double alpha_dot = 0.0;
            const auto& alpha = lvl.table.list[a];
            for (std::size_t i = 0; i < alpha.size(); ++i) alpha_dot += alpha[i] * lx[i];
            terms(a, j) = base + alpha_dot;
            acc_max[a] = std::max(acc_max[a], terms(a, j));
        }
    }
    RealVec out(nk);
    for (int a = 0; a < nk; ++a) {
        double s = 0.0;
        for (int j = 0; j < nf; ++j) s += std::exp(terms(a, j) - acc_max[a]);
        out[a] = acc_max[a] + std::log(s);
    }
    return out;
}

}  // namespace

BundleMetricField hilb_metric(const SplitModel& model, const FiberedForm& form, int level,
                              par::ExecPolicy policy, bool validate) {
    if (level < 1) throw ValidationError("hilb_metric: level must be >= 1");
    if (level % form.k() != 0)
        throw ValidationError("hilb_metric: level must be a multiple of the form power");
    auto model_ptr = form.model_ptr();
    auto grid_ptr = form.grid_ptr();
    FiberedForm form_copy = form;
    auto fn = [model_ptr, form_copy, level](double u) {
        return hilb_log_diag_rule(*model_ptr, form_copy, level, u, form_copy.grid().fiber);
    };
    if (validate) {
        const quad::SimplexRule fine =
            quad::simplex_rule(model.fiber_dim(), std::max(8, grid_ptr->fiber_axis * 2));
        const int nb = grid_ptr->base_count();
        std::vector<double> worst(nb, 0.0);
        par::for_index_collect(nb, policy, [&](std::size_t i) {
            const double u = grid_ptr->u_nodes[i];
            const RealVec coarse = hilb_log_diag_rule(model, form_copy, level, u,
                                                      grid_ptr->fiber);
            const RealVec refined = hilb_log_diag_rule(model, form_copy, level, u, fine);
            worst[i] = (coarse - refined).cwiseAbs().maxCoeff();
        });
        for (int i = 0; i < nb; ++i)
            if (worst[i] > tol::hilb_refine_rel)
                throw ConvergenceError(
                    "hilb_metric: fiber quadrature not converged (relative change " +
                    std::to_string(worst[i]) + " at u=" + std::to_string(grid_ptr->u_nodes[i]) +
                    ")");
    }
    return BundleMetricField::diagonal(model_ptr, grid_ptr, level, fn);
}

FiberedForm fs_potential(const BundleMetricField& field, bool check_positivity) {
    if (!field.is_diagonal())
        throw ValidationError("fs_potential: requires a torus-invariant (diagonal) field");
    auto model_ptr = field.model_ptr();
    const int k = field.k();
    const auto& lvl = model_ptr->level(k);
    const int nk = static_cast<int>(lvl.table.size());
    auto field_copy = field;
    auto pot = [field_copy, nk, &lvl](double u, const std::vector<double>& x) {
        const RealVec ld = field_copy.log_diag(u);
        const RealVec lx = log_xhat(x);
        RealVec terms(nk);
        for (int a = 0; a < nk; ++a) {
            double alpha_dot = 0.0;
            const auto& alpha = lvl.table.list[a];
            for (std::size_t i = 0; i < alpha.size(); ++i) alpha_dot += alpha[i] * lx[i];
            terms[a] = alpha_dot - ld[a];
        }
        return lse(terms);
    };
    return FiberedForm(model_ptr, field.grid_ptr(), k, pot, check_positivity);
}

// -------------------------------------------------------------- curvature

namespace {

// Richardson-refined second derivative of a vector-valued function of sigma.
RealVec second_derivative(const std::function<RealVec(double)>& g, double sigma,
                          double target_rel) {
    auto d2 = [&](double h) {
        return ((g(sigma + h) - 2.0 * g(sigma) + g(sigma - h)) / (h * h)).eval();
    };
    double h = tol::fd_base_step;
    RealVec coarse = d2(h), fine = d2(h / 2);
    RealVec rich = (4.0 * fine - coarse) / 3.0;
    double best_err = 1e300;
    RealVec best = rich;
    for (int level = 0; level < tol::fd_max_levels; ++level) {
        h /= 2;
        coarse = fine;
        fine = d2(h / 2);
        const RealVec next = (4.0 * fine - coarse) / 3.0;
        const double err = (next - rich).norm();
        rich = next;
        if (err <= target_rel * std::max(rich.norm(), 1e-12)) return rich;
        if (err < best_err) {
            best_err = err;
            best = rich;
        }
    }
    if (best_err <= tol::fd_fallback_rel * std::max(best.norm(), 1e-12)) return best;
    throw ConvergenceError("bundle_curvature: Richardson refinement stalled");
}

Mat dense_curvature_at(const BundleMetricField& field, double u) {
    const double sigma = sigma_of_u(u);
    auto gm = [&](double s) { return field.gram(u_of_sigma(s)); };
    auto density = [&](double h) {
        const Mat g0 = gm(sigma);
        const Mat gp = gm(sigma + h), gmn = gm(sigma - h);
        const Mat dg = (gp - gmn) / (2.0 * h);
        const Mat d2g = (gp - 2.0 * g0 + gmn) / (h * h);
        const Mat hinv_dg = g0.llt().solve(dg);
        const Mat r = g0.llt().solve(d2g) - hinv_dg * hinv_dg;
        return (-r / (u * (1.0 - u))).eval();
    };
    double h = tol::fd_base_step;
    Mat coarse = density(h), fine = density(h / 2);
    Mat rich = (4.0 * fine - coarse) / 3.0;
    for (int level = 0; level < tol::fd_max_levels; ++level) {
        h /= 2;
        coarse = fine;
        fine = density(h / 2);
        const Mat next = (4.0 * fine - coarse) / 3.0;
        const double err = (next - rich).norm();
        rich = next;
        if (err <= tol::fd_target_rel * std::max(rich.norm(), 1e-10)) break;
    }
    // clean up: the density is Hermitian with respect to the metric
    const Mat g = field.gram(u);
    return g.llt().solve(lin::hermitize(g * rich));
}

}  // namespace

Mat curvature_density_at(const BundleMetricField& field, double u) {
    if (field.is_diagonal()) {
        auto g = [&](double s) { return field.log_diag(u_of_sigma(s)); };
        const RealVec d2 = second_derivative(g, sigma_of_u(u), tol::fd_target_rel);
        Mat out = Mat::Zero(field.rank(), field.rank());
        for (int i = 0; i < field.rank(); ++i) out(i, i) = -d2[i] / (u * (1.0 - u));
        return out;
    }
    return dense_curvature_at(field, u);
}

std::vector<Mat> bundle_curvature(const BundleMetricField& field, par::ExecPolicy policy) {
    const int nb = field.grid().base_count();
    std::vector<Mat> out(nb);
    par::for_index_collect(nb, policy, [&](std::size_t i) {
        out[i] = curvature_density_at(field, field.grid().u_nodes[i]);
    });
    return out;
}

HymResult hym_functional(const BundleMetricField& field, double t, par::ExecPolicy policy) {
    const int nb = field.grid().base_count();
    std::vector<double> op(nb, 0.0), tr(nb, 0.0);
    par::for_index_collect(nb, policy, [&](std::size_t i) {
        const double u = field.grid().u_nodes[i];
        const Mat dens = curvature_density_at(field, u);
        if (field.is_diagonal()) {
            double mx = 0.0, sum = 0.0;
            for (int a = 0; a < field.rank(); ++a) {
                const double v = std::abs(std::real(dens(a, a)) - t);
                mx = std::max(mx, v);
                sum += v;
            }
            op[i] = mx;
            tr[i] = sum;
        } else {
            const Mat g = field.gram(u);
            const Mat shifted = dens - t * Mat::Identity(field.rank(), field.rank());
            op[i] = lin::op_norm(shifted, g);
            tr[i] = lin::trace_abs(shifted, g);
        }
    });
    HymResult res{0.0, 0.0};
    for (int i = 0; i < nb; ++i) {
        res.op_norm += field.grid().u_weights[i] * op[i];
        res.trace_norm += field.grid().u_weights[i] * tr[i];
    }
    return res;
}

BundleMetricField critical_metric(std::shared_ptr<const SplitModel> model,
                                  std::shared_ptr<const RadialGrid> grid, int k) {
    const auto& lvl = model->level(k);
    const int nk = static_cast<int>(lvl.table.size());
    const int r = model->rank();
    RealVec log_c(nk);
    for (int a = 0; a < nk; ++a) {
        double lc = std::lgamma(r) - std::lgamma(k + r);
        for (int i = 0; i < r; ++i) lc += std::lgamma(lvl.table.list[a][i] + 1.0);
        log_c[a] = lc;
    }
    RealVec slopes(nk);
    for (int a = 0; a < nk; ++a) slopes[a] = lvl.slopes[a];
    auto fn = [log_c, slopes](double u) {
        return (log_c + slopes * std::log1p(-u)).eval();
    };
    return BundleMetricField::diagonal(std::move(model), std::move(grid), k, fn);
}

DeltaApprox is_delta_approx(const BundleMetricField& field, double delta,
                            par::ExecPolicy policy) {
    const int nb = field.grid().base_count();
    const auto& lvl = field.model().level(field.k());
    std::vector<double> node(nb, 0.0);
    const bool diag = field.is_diagonal();
    std::shared_ptr<flag::Filtration> hn;
    if (!diag) hn = std::make_shared<flag::Filtration>(hn_filtration(field.model(), field.k()));
    par::for_index_collect(nb, policy, [&](std::size_t i) {
        const double u = field.grid().u_nodes[i];
        const Mat dens = curvature_density_at(field, u);
        if (diag) {
            double mx = 0.0;
            for (int a = 0; a < field.rank(); ++a)
                mx = std::max(mx, std::abs(std::real(dens(a, a)) - lvl.slopes[a]));
            node[i] = mx;
        } else {
            const Mat g = field.gram(u);
            const Mat a = flag::weight_operator(flag::HermitianProduct(g), *hn);
            node[i] = lin::op_norm(dens - a, g);
        }
    });
    double residual = 0.0;
    for (int i = 0; i < nb; ++i) residual += field.grid().u_weights[i] * node[i];
    return {residual <= delta, residual};
}

BundleMetricField ray_field(const BundleMetricField& field, double s) {
    if (s == 0.0) return field;
    auto model_ptr = field.model_ptr();
    const auto& lvl = model_ptr->level(field.k());
    if (field.is_diagonal()) {
        RealVec slopes(static_cast<int>(lvl.slopes.size()));
        for (int a = 0; a < slopes.size(); ++a) slopes[a] = lvl.slopes[a];
        auto parent = field;
        auto fn = [parent, slopes, s](double u) {
            return (parent.log_diag(u) - s * slopes).eval();
        };
        return BundleMetricField::diagonal(model_ptr, field.grid_ptr(), field.k(), fn);
    }
    auto hn = std::make_shared<flag::Filtration>(hn_filtration(*model_ptr, field.k()));
    auto parent = field;
    auto fn = [parent, hn, s](double u) {
        return flag::geodesic_ray(flag::HermitianProduct(parent.gram(u)), *hn, s).gram();
    };
    return BundleMetricField::dense(model_ptr, field.grid_ptr(), field.k(), fn);
}

// ------------------------------------------------- multiplication quotient

namespace {

struct MultMap {
    MultiIndexTable sym;                      // multiindices over N_k slots, degree l
    std::vector<int> target_of_col;           // merged monomial index in E_{kl}
    std::vector<std::vector<int>> preimages;  // per E_{kl} frame index
    std::vector<double> log_sym_factor;       // log(beta!/l!)
};

MultMap build_mult_map(const SplitModel& model, int k, int l) {
    const auto& lvl_k = model.level(k);
    const auto& lvl_kl = model.level(k * l);
    const int nk = static_cast<int>(lvl_k.table.size());
    MultMap m{MultiIndexTable(nk, l), {}, {}, {}};
    m.preimages.resize(lvl_kl.table.size());
    const int r = model.rank();
    for (int c = 0; c < m.sym.size(); ++c) {
        const MultiIndex& beta = m.sym.list[c];
        MultiIndex merged(r, 0);
        for (int j = 0; j < nk; ++j)
            for (int i = 0; i < r; ++i) merged[i] += beta[j] * lvl_k.table.list[j][i];
        const int target = lvl_kl.table.index_of(merged);
        m.target_of_col.push_back(target);
        m.preimages[target].push_back(c);
        m.log_sym_factor.push_back(std::log(multiindex_norm_sq(beta)));
    }
    return m;
}

}  // namespace

BundleMetricField mult_quotient_metric(const BundleMetricField& field, int l) {
    if (l < 1) throw ValidationError("mult_quotient_metric: l must be >= 1");
    auto model_ptr = field.model_ptr();
    const int k = field.k();
    auto mm = std::make_shared<MultMap>(build_mult_map(*model_ptr, k, l));
    if (field.is_diagonal()) {
        auto parent = field;
        const auto& lvl_k = model_ptr->level(k);
        const int nk = static_cast<int>(lvl_k.table.size());
        auto fn = [parent, mm, nk, l](double u) {
            const RealVec ld = parent.log_diag(u);
            RealVec out(static_cast<int>(mm->preimages.size()));
            for (std::size_t t = 0; t < mm->preimages.size(); ++t) {
                // harmonic combination of the diagonal Sym norms over the
                // preimage monomials: |f|^2 = 1 / sum 1/G_beta
                RealVec neg(static_cast<int>(mm->preimages[t].size()));
                for (std::size_t p = 0; p < mm->preimages[t].size(); ++p) {
                    const int c = mm->preimages[t][p];
                    double lg = mm->log_sym_factor[c];
                    const MultiIndex& beta = mm->sym.list[c];
                    for (int j = 0; j < nk; ++j)
                        if (beta[j]) lg += beta[j] * ld[j];
                    neg[static_cast<int>(p)] = -lg;
                }
                out[static_cast<int>(t)] = -lse(neg);
            }
            return out;
        };
        return BundleMetricField::diagonal(model_ptr, field.grid_ptr(), k * l, fn);
    }
    // dense: pointwise flag machinery through the merge surjection
    const auto& lvl_kl = model_ptr->level(k * l);
    Mat p = Mat::Zero(static_cast<int>(lvl_kl.table.size()), mm->sym.size());
    for (int c = 0; c < mm->sym.size(); ++c) p(mm->target_of_col[c], c) = 1.0;
    auto surj = std::make_shared<flag::LinearSurjection>(p);
    auto parent = field;
    auto fn = [parent, surj, l](double u) {
        const flag::HermitianProduct sym =
            flag::sym_metric(flag::HermitianProduct(parent.gram(u)), l);
        return flag::quotient_metric(sym, *surj).gram();
    };
    return BundleMetricField::dense(model_ptr, field.grid_ptr(), k * l, fn);
}

RatioInterval quotient_vs_hilb_ratio(const SplitModel& model, const BundleMetricField& field,
                                     int k, int l, par::ExecPolicy policy) {
    if (field.k() != k) throw ValidationError("quotient_vs_hilb_ratio: field level mismatch");
    const BundleMetricField quot = mult_quotient_metric(field, l);
    const FiberedForm fs = fs_potential(field);
    const BundleMetricField hilb = hilb_metric(model, fs, k * l, policy);
    const int n = model.fiber_dim();
    double log_scale = std::lgamma(n + 1.0) - std::log(double(k)) - n * std::log(double(l));
    const int nb = field.grid().base_count();
    std::vector<double> lo(nb, 1e300), hi(nb, -1e300);
    par::for_index_collect(nb, policy, [&](std::size_t i) {
        const double u = field.grid().u_nodes[i];
        if (quot.is_diagonal()) {
            const RealVec a = quot.log_diag(u);
            const RealVec b = hilb.log_diag(u);
            for (int j = 0; j < a.size(); ++j) {
                const double ratio = std::exp(a[j] - b[j] + log_scale);
                lo[i] = std::min(lo[i], ratio);
                hi[i] = std::max(hi[i], ratio);
            }
        } else {
            const RealVec eig = lin::h_spectrum(
                hilb.gram(u).llt().solve(quot.gram(u) * std::exp(log_scale)), hilb.gram(u));
            lo[i] = eig.minCoeff();
            hi[i] = eig.maxCoeff();
        }
    });
    RatioInterval out{1e300, -1e300};
    for (int i = 0; i < nb; ++i) {
        out.lo = std::min(out.lo, lo[i]);
        out.hi = std::max(out.hi, hi[i]);
    }
    return out;
}

FiberedForm dequantize(const SplitModel& model, int k, double s, const BundleMetricField& h0) {
    if (h0.k() != k) throw ValidationError("dequantize: field level mismatch");
    (void)model;
    return fs_potential(ray_field(h0, s), true);
}

HymOnHilbResult hym_on_hilb(const SplitModel& model, const FiberedForm& hpot, int k, double t,
                            par::ExecPolicy policy) {
    const BundleMetricField h = hilb_metric(model, hpot, k, policy);
    const HymResult hym = hym_functional(h, t * k, policy);
    const double nk = static_cast<double>(h.rank());
    return {hym.trace_norm / (k * nk), hym.op_norm / (k * nk)};
}

Mat fs_hilb_roundtrip_gram(const BundleMetricField& field, double u, int theta_nodes) {
    const auto& lvl = field.model().level(field.k());
    const int nk = static_cast<int>(lvl.table.size());
    const auto& rule = field.grid().fiber;
    if (field.is_diagonal()) {
        const RealVec ld = field.log_diag(u);
        Mat out = Mat::Zero(nk, nk);
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            const RealVec lx = log_xhat(rule.nodes[j]);
            RealVec terms(nk);
            for (int a = 0; a < nk; ++a) {
                double alpha_dot = 0.0;
                for (std::size_t i = 0; i < lvl.table.list[a].size(); ++i)
                    alpha_dot += lvl.table.list[a][i] * lx[i];
                terms[a] = alpha_dot - ld[a];
            }
            const double log_k = lse(terms);
            for (int a = 0; a < nk; ++a)
                out(a, a) += rule.weights[j] * std::exp(terms[a] + ld[a] - log_k);
        }
        return out;
    }
    if (field.model().rank() != 2)
        throw ValidationError("fs_hilb_roundtrip_gram: dense path implemented for rank 2 only");
    const int k = field.k();
    const Mat g = field.gram(u);
    const Mat ginv_t = g.inverse().transpose();
    Mat out = Mat::Zero(nk, nk);
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double x = rule.nodes[j][0];
        for (int t = 0; t < theta_nodes; ++t) {
            const double theta = 2.0 * std::numbers::pi * t / theta_nodes;
            Vec m(nk);
            for (int a = 0; a < nk; ++a) {
                const int pow1 = lvl.table.list[a][0];
                const double mod = std::sqrt(std::pow(x, pow1) * std::pow(1.0 - x, k - pow1));
                m[a] = mod * std::exp(Complex(0.0, pow1 * theta));
            }
            const double kernel = std::real((m.adjoint() * ginv_t * m)(0, 0));
            const double w = rule.weights[j] / theta_nodes;
            out += (w / kernel) * (m * m.adjoint()).transpose();
        }
    }
    return lin::hermitize(out);
}

}  // namespace wzw::geom
