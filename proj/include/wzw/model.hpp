#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "wzw/multiindex.hpp"
#include "wzw/quadrature.hpp"
#include "wzw/types.hpp"

namespace wzw::geom {

// X = P(E*) -> P^1 for E = O(a_1) (+) ... (+) O(a_r).  The base coordinate is
// u = |z|^2 / (1 + |z|^2), in which the unit-mass Fubini-Study measure is the
// uniform measure on [0,1]; fiber coordinates are the simplex coordinates
// x_i = |w_i|^2 / sum |w_j|^2.
class SplitModel {
  public:
    explicit SplitModel(std::vector<int> degrees);

    const std::vector<int>& degrees() const { return degrees_; }
    int rank() const { return r_; }
    int fiber_dim() const { return n_; }
    int degree_sum() const { return degree_sum_; }

    // E_k = Sym^k E = (+)_{|alpha|=k} O(alpha.a) in the canonical monomial
    // frame order (lexicographically descending exponents).
    struct Level {
        int k;
        MultiIndexTable table;       // monomials over r slots
        std::vector<double> slopes;  // alpha.a per frame index
    };
    const Level& level(int k) const;  // cached; validates N_k cap

  private:
    struct LevelCache {
        std::mutex mutex;
        std::vector<std::shared_ptr<Level>> levels;
    };
    std::vector<int> degrees_;
    int r_, n_, degree_sum_;
    std::shared_ptr<LevelCache> cache_;  // shared across copies
};

struct GridSpec {
    int base_nodes = 0;   // 0: default for the rank
    int fiber_nodes = 0;  // per fiber axis
};

struct RadialGrid {
    std::vector<double> u_nodes;   // Gauss-Legendre in u, weights sum to 1
    std::vector<double> u_weights;
    quad::SimplexRule fiber;       // probability weights on the simplex
    int fiber_axis = 0;            // nodes per fiber axis
    int base_count() const { return static_cast<int>(u_nodes.size()); }
    long node_count() const { return static_cast<long>(u_nodes.size()) * fiber.nodes.size(); }
};

RadialGrid make_grid(const SplitModel& model, const GridSpec& spec);

inline std::pair<SplitModel, RadialGrid> model_new(std::vector<int> degrees,
                                                   const GridSpec& spec = {}) {
    SplitModel m(std::move(degrees));
    RadialGrid g = make_grid(m, spec);
    return {std::move(m), std::move(g)};
}

// log-radial base coordinate
inline double u_of_sigma(double sigma) { return 1.0 / (1.0 + std::exp(-sigma)); }
inline double sigma_of_u(double u) { return std::log(u) - std::log1p(-u); }

}  // namespace wzw::geom
