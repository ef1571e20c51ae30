#include "wzw/model.hpp"

#include <cmath>
#include <string>

#include "wzw/tolerances.hpp"

namespace wzw::geom {

SplitModel::SplitModel(std::vector<int> degrees)
    : degrees_(std::move(degrees)), cache_(std::make_shared<LevelCache>()) {
    r_ = static_cast<int>(degrees_.size());
    if (r_ < 1) throw ValidationError("SplitModel: need at least one summand");
    n_ = r_ - 1;
    degree_sum_ = 0;
    for (int a : degrees_) degree_sum_ += a;
    // duplicate degrees are kept (multiset semantics)
}

const SplitModel::Level& SplitModel::level(int k) const {
    if (k < 1) throw ValidationError("SplitModel::level: k must be >= 1");
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto& levels_ = cache_->levels;
    if (static_cast<int>(levels_.size()) < k) levels_.resize(k);
    if (!levels_[k - 1]) {
        const long nk = sym_dimension(r_, k);
        if (nk > tol::cap_rank)
            throw ValidationError("SplitModel::level: N_k = " + std::to_string(nk) +
                                  " exceeds cap " + std::to_string(tol::cap_rank));
        auto lvl = std::make_shared<Level>(Level{k, MultiIndexTable(r_, k), {}});
        lvl->slopes.reserve(lvl->table.size());
        for (const auto& alpha : lvl->table.list) {
            double s = 0.0;
            for (int i = 0; i < r_; ++i) s += alpha[i] * degrees_[i];
            lvl->slopes.push_back(s);
        }
        levels_[k - 1] = std::move(lvl);
    }
    return *levels_[k - 1];
}

RadialGrid make_grid(const SplitModel& model, const GridSpec& spec) {
    int base = spec.base_nodes;
    int fiber = spec.fiber_nodes;
    // hard-floor defaults per rank (finite-difference resolution ladder)
    const int def = model.rank() <= 2 ? 256 : (model.rank() == 3 ? 64 : 24);
    if (base == 0) base = def;
    if (fiber == 0) fiber = def;
    if (base < 8 || (model.fiber_dim() > 0 && fiber < 8))
        throw ValidationError("make_grid: need at least 8 nodes per dimension");
    if (static_cast<long>(base) * std::pow(static_cast<double>(fiber),
                                           model.fiber_dim()) > 64e6)
        throw ValidationError("make_grid: grid too large");
    RadialGrid g;
    const auto u = quad::gauss_legendre_ab(base, 0.0, 1.0);
    g.u_nodes = u.nodes;
    g.u_weights = u.weights;
    g.fiber = quad::simplex_rule(model.fiber_dim(), fiber);
    g.fiber_axis = fiber;
    return g;
}

}  // namespace wzw::geom
