#include "wzw/fibered_form.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "wzw/tolerances.hpp"

namespace wzw::geom {

namespace {

// x (simplex coordinates, first n entries) -> xi = log(x_i / x_r)
std::vector<double> xi_of_x(const std::vector<double>& x) {
    double xr = 1.0;
    for (double v : x) xr -= v;
    xr = std::max(xr, 1e-300);
    std::vector<double> xi(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xi[i] = std::log(std::max(x[i], 1e-300) / xr);
    return xi;
}

// xi -> x, stable softmax with the implicit slot r at xi_r = 0
std::vector<double> x_of_xi(const std::vector<double>& xi) {
    double m = 0.0;
    for (double v : xi) m = std::max(m, v);
    double denom = std::exp(-m);
    std::vector<double> x(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) {
        x[i] = std::exp(xi[i] - m);
        denom += x[i];
    }
    for (double& v : x) v /= denom;
    return x;
}

double lse_chart(const std::vector<double>& xi) {
    // log(1 + sum e^{xi_i}), stable
    double m = 0.0;
    for (double v : xi) m = std::max(m, v);
    double s = std::exp(-m);
    for (double v : xi) s += std::exp(v - m);
    return m + std::log(s);
}

}  // namespace

FiberedForm::FiberedForm(std::shared_ptr<const SplitModel> model,
                         std::shared_ptr<const RadialGrid> grid, int k, Potential potential,
                         bool check_positivity)
    : model_(std::move(model)), grid_(std::move(grid)), k_(k), potential_(std::move(potential)) {
    if (k_ < 1) throw ValidationError("FiberedForm: power k must be >= 1");
    const int nb = grid_->base_count();
    const int nf = static_cast<int>(grid_->fiber.nodes.size());
    values_ = RealMat(nb, nf);
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nf; ++j) values_(i, j) = potential_(grid_->u_nodes[i], grid_->fiber.nodes[j]);
    if (check_positivity) check_positivity_and_charts();
}

double FiberedForm::log_potential(double sigma, const std::vector<double>& xi) const {
    const double u = u_of_sigma(sigma);
    return potential_(u, x_of_xi(xi)) / k_ + lse_chart(xi);
}

namespace {

// centered second differences of a callable R^{d} -> R with one Richardson
// extrapolation step; refined until the relative change is below target.
RealMat fd_hessian(const std::function<double(const std::vector<double>&)>& f,
                   const std::vector<double>& at, double target_rel) {
    const int d = static_cast<int>(at.size());
    auto raw_hessian = [&](double h) {
        RealMat m(d, d);
        std::vector<double> p(at);
        const double f0 = f(at);
        for (int i = 0; i < d; ++i) {
            p = at;
            p[i] = at[i] + h;
            const double fp = f(p);
            p[i] = at[i] - h;
            const double fm = f(p);
            m(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
            for (int j = i + 1; j < d; ++j) {
                p = at;
                p[i] = at[i] + h;
                p[j] = at[j] + h;
                const double fpp = f(p);
                p[j] = at[j] - h;
                const double fpm = f(p);
                p[i] = at[i] - h;
                const double fmm = f(p);
                p[j] = at[j] + h;
                const double fmp = f(p);
                m(i, j) = m(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            }
        }
        return m;
    };
    double h = tol::fd_base_step;
    RealMat coarse = raw_hessian(h);
    RealMat fine = raw_hessian(h / 2);
    RealMat rich = (4.0 * fine - coarse) / 3.0;
    double best_err = 1e300;
    RealMat best = rich;
    for (int level = 0; level < tol::fd_max_levels; ++level) {
        h /= 2;
        coarse = fine;
        fine = raw_hessian(h / 2);
        const RealMat next = (4.0 * fine - coarse) / 3.0;
        const double err = (next - rich).norm();
        rich = next;
        if (err <= target_rel * std::max(rich.norm(), 1e-12)) return rich;
        if (err < best_err) {
            best_err = err;
            best = rich;
        }
    }
    // noise-limited nodes (rounding floor of the centered differences) are
    // accepted below the fallback cap; the integral-level doubling checks
    // keep the overall accuracy honest
    if (best_err <= tol::fd_fallback_rel * std::max(best.norm(), 1e-12)) return best;
    throw ConvergenceError("fd_hessian: Richardson refinement did not reach target");
}

}  // namespace

RealMat FiberedForm::log_hessian(double sigma, const std::vector<double>& xi) const {
    const int d = model_->fiber_dim() + 1;
    std::vector<double> at(d);
    at[0] = sigma;
    for (int i = 1; i < d; ++i) at[i] = xi[i - 1];
    auto f = [&](const std::vector<double>& p) {
        const std::vector<double> x(p.begin() + 1, p.end());
        return log_potential(p[0], x);
    };
    return fd_hessian(f, at, tol::fd_target_rel);
}

double FiberedForm::ma_quotient(double u, const std::vector<double>& x) const {
    const int n = model_->fiber_dim();
    if (n == 0) return 1.0;
    const auto xi = xi_of_x(x);
    const RealMat h = log_hessian(sigma_of_u(u), xi);
    const RealMat c = h.bottomRightCorner(n, n);
    double prod = 1.0, xr = 1.0;
    for (double v : x) {
        prod *= v;
        xr -= v;
    }
    prod *= std::max(xr, 1e-300);
    return std::max(c.determinant(), 0.0) / prod;
}

void FiberedForm::check_positivity_and_charts() {
    const int nb = grid_->base_count();
    const int nf = static_cast<int>(grid_->fiber.nodes.size());
    const int n = model_->fiber_dim();
    // chart compatibility: the compactified potential must stay finite toward
    // the base chart boundaries
    for (double u : {1e-5, 1.0 - 1e-5}) {
        for (int j = 0; j < std::min(nf, 3); ++j) {
            const double v = potential_(u, grid_->fiber.nodes[j]);
            if (!std::isfinite(v))
                throw PositivityError("FiberedForm: potential blows up near the chart boundary",
                                      u, grid_->fiber.nodes[j]);
        }
    }
    if (n == 0) return;
    std::vector<int> degenerate(nb, 0);
    std::vector<int> bad_base(nb, -1), bad_fiber(nb, -1);
    par::for_index_collect(nb, par::default_policy(), [&](std::size_t i) {
        for (int j = 0; j < nf; ++j) {
            const auto& x = grid_->fiber.nodes[j];
            const auto xi = xi_of_x(x);
            const RealMat h = log_hessian(sigma_of_u(grid_->u_nodes[i]), xi);
            const RealMat c = h.bottomRightCorner(n, n);
            // whiten against the reference Fubini-Study fiber Hessian
            // diag(x) - x x^T, whose scale degenerates at the simplex corners
            RealMat fs = RealMat::Zero(n, n);
            for (int a = 0; a < n; ++a) {
                fs(a, a) = x[a];
                for (int b = 0; b < n; ++b) fs(a, b) -= x[a] * x[b];
            }
            Eigen::LLT<RealMat> llt(fs);
            const RealMat w = llt.matrixL().solve(
                llt.matrixL().solve(c).transpose().eval()).transpose();
            const double min_eig =
                Eigen::SelfAdjointEigenSolver<RealMat>(0.5 * (w + w.transpose()),
                                                       Eigen::EigenvaluesOnly)
                    .eigenvalues()
                    .minCoeff();
            if (min_eig < -tol::fiber_negativity) {
                bad_base[i] = static_cast<int>(i);
                bad_fiber[i] = j;
                return;
            }
            if (min_eig < tol::fiber_pd_floor) ++degenerate[i];
        }
    });
    for (int i = 0; i < nb; ++i) {
        if (bad_base[i] >= 0) {
            const auto& x = grid_->fiber.nodes[bad_fiber[i]];
            throw PositivityError(
                "FiberedForm: fiber Hessian negative at u=" + std::to_string(grid_->u_nodes[i]),
                grid_->u_nodes[i], x);
        }
        degenerate_nodes_ += degenerate[i];
    }
}

CurvatureFields line_curvature(const FiberedForm& form, par::ExecPolicy policy) {
    const auto& grid = form.grid();
    const int nb = grid.base_count();
    const int nf = static_cast<int>(grid.fiber.nodes.size());
    const int n = form.model().fiber_dim();
    CurvatureFields out;
    out.top_density = RealMat(nb, nf);
    out.vertical_density = RealMat(nb, nf);
    out.horizontal_trace = RealMat(nb, nf);
    par::for_index_collect(static_cast<std::size_t>(nb) * nf, policy, [&](std::size_t flat) {
        const int i = static_cast<int>(flat / nf);
        const int j = static_cast<int>(flat % nf);
        const double u = grid.u_nodes[i];
        const auto& x = grid.fiber.nodes[j];
        const auto xi = xi_of_x(x);
        const RealMat h = form.log_hessian(sigma_of_u(u), xi);
        double prod = u * (1.0 - u), prod_x = 1.0, xr = 1.0;
        for (double v : x) {
            prod_x *= v;
            xr -= v;
        }
        prod_x *= std::max(xr, 1e-300);
        const double det_full = h.determinant();
        const double det_fiber = (n == 0) ? 1.0 : h.bottomRightCorner(n, n).determinant();
        const double a = det_full / (prod * prod_x);
        const double q = std::max(det_fiber, 0.0) / prod_x;
        out.top_density(i, j) = a;
        out.vertical_density(i, j) = q;
        out.horizontal_trace(i, j) = (q > 1e-14) ? a / q : 0.0;
    });
    return out;
}

namespace {

WzwResult wzw_on_grid(const FiberedForm& form, const CurvatureFields& fields, double t,
                      par::ExecPolicy policy) {
    const auto& grid = form.grid();
    const int nf = static_cast<int>(grid.fiber.nodes.size());
    const int np1 = form.model().fiber_dim() + 1;
    const std::size_t total = static_cast<std::size_t>(grid.base_count()) * nf;
    auto weight = [&](std::size_t flat) {
        const int i = static_cast<int>(flat / nf);
        const int j = static_cast<int>(flat % nf);
        return grid.u_weights[i] * grid.fiber.weights[j];
    };
    WzwResult res;
    res.value = np1 * par::chunked_sum(total, policy, [&](std::size_t flat) {
        const int i = static_cast<int>(flat / nf);
        const int j = static_cast<int>(flat % nf);
        return weight(flat) *
               std::abs(fields.top_density(i, j) - t * fields.vertical_density(i, j));
    });
    res.signed_integral = np1 * par::chunked_sum(total, policy, [&](std::size_t flat) {
        const int i = static_cast<int>(flat / nf);
        const int j = static_cast<int>(flat % nf);
        return weight(flat) * (fields.top_density(i, j) - t * fields.vertical_density(i, j));
    });
    return res;
}

}  // namespace

WzwResult wzw_functional(const FiberedForm& form, double t, par::ExecPolicy policy, bool check) {
    const CurvatureFields fields = line_curvature(form, policy);
    const WzwResult res = wzw_on_grid(form, fields, t, policy);
    if (check) {
        GridSpec doubled;
        doubled.base_nodes = form.grid().base_count() * 2;
        doubled.fiber_nodes = std::max(8, form.grid().fiber_axis * 2);
        auto fine_grid = std::make_shared<RadialGrid>(make_grid(form.model(), doubled));
        FiberedForm fine(form.model_ptr(), fine_grid, form.k(),
                         [&form](double u, const std::vector<double>& x) { return form.phi(u, x); },
                         false);
        const WzwResult res2 = wzw_on_grid(fine, line_curvature(fine, policy), t, policy);
        const double scale = std::max({std::abs(res.value), std::abs(res2.value), 1.0});
        if (std::abs(res.value - res2.value) > 5e-4 * scale)
            throw ConvergenceError("wzw_functional: grid doubling changed the value by " +
                                   std::to_string(std::abs(res.value - res2.value)));
    }
    return res;
}

double hermite_einstein_residual(const FiberedForm& form, double lambda, par::ExecPolicy policy) {
    return wzw_functional(form, lambda, policy).value;
}

FiberedForm reference_potential(std::shared_ptr<const SplitModel> model,
                                std::shared_ptr<const RadialGrid> grid, int k) {
    const std::vector<int> degrees = model->degrees();
    auto pot = [degrees, k](double u, const std::vector<double>& x) {
        const double lom = std::log1p(-u);  // log(1-u)
        double m = -1e300;
        const int r = static_cast<int>(degrees.size());
        double xr = 1.0;
        for (double v : x) xr -= v;
        for (int i = 0; i < r; ++i) {
            const double xi = (i + 1 < r) ? x[i] : std::max(xr, 1e-300);
            const double term = std::log(std::max(xi, 1e-300)) - degrees[i] * lom;
            m = std::max(m, term);
        }
        double s = 0.0;
        for (int i = 0; i < r; ++i) {
            const double xi = (i + 1 < r) ? x[i] : std::max(xr, 1e-300);
            s += std::exp(std::log(std::max(xi, 1e-300)) - degrees[i] * lom - m);
        }
        return k * (m + std::log(s));
    };
    return FiberedForm(std::move(model), std::move(grid), k, pot);
}

}  // namespace wzw::geom
