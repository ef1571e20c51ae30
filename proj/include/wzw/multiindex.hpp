#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "wzw/tolerances.hpp"
#include "wzw/types.hpp"

namespace wzw {

using MultiIndex = std::vector<int>;

// dim Sym^l(C^slots) = C(l + slots - 1, slots - 1), guarded by the cap.
long sym_dimension(int slots, int degree);

// All multi-indices alpha with |alpha| = degree over `slots` slots, in
// lexicographically descending order: (l,0,..), (l-1,1,0,..), ...
// This order is the canonical monomial frame everywhere in the project.
std::vector<MultiIndex> enumerate_multiindices(int slots, int degree);

// Position lookup for the canonical order.
struct MultiIndexTable {
    std::vector<MultiIndex> list;
    std::map<MultiIndex, int> position;

    explicit MultiIndexTable(int slots, int degree) : list(enumerate_multiindices(slots, degree)) {
        for (int i = 0; i < static_cast<int>(list.size()); ++i) position[list[i]] = i;
    }
    int index_of(const MultiIndex& a) const { return position.at(a); }
    int size() const { return static_cast<int>(list.size()); }
};

inline double dot(const MultiIndex& a, const std::vector<double>& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * w[i];
    return s;
}

inline double log_factorial(int n) {
    double s = 0.0;
    for (int i = 2; i <= n; ++i) s += std::log(static_cast<double>(i));
    return s;
}

// alpha! / l!  (the squared Sym-norm of a monomial of an orthonormal basis).
inline double multiindex_norm_sq(const MultiIndex& a) {
    int l = 0;
    double log_num = 0.0;
    for (int ai : a) {
        log_num += log_factorial(ai);
        l += ai;
    }
    return std::exp(log_num - log_factorial(l));
}

}  // namespace wzw
