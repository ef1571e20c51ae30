#include "wzw/multiindex.hpp"

#include <string>

namespace wzw {

long sym_dimension(int slots, int degree) {
    if (slots < 1 || degree < 0) throw ValidationError("sym_dimension: bad arguments");
    // C(degree + slots - 1, slots - 1) with overflow-safe incremental product
    long result = 1;
    for (int i = 1; i <= slots - 1; ++i) {
        result = result * (degree + i) / i;
        if (result > 100 * tol::cap_sym_dim)
            throw ValidationError("sym_dimension: dimension exceeds cap " +
                                  std::to_string(tol::cap_sym_dim));
    }
    if (result > tol::cap_sym_dim)
        throw ValidationError("sym_dimension: dim Sym = " + std::to_string(result) +
                              " exceeds cap " + std::to_string(tol::cap_sym_dim));
    return result;
}

namespace {
void recurse(int slots, int remaining, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (static_cast<int>(cur.size()) == slots - 1) {
        cur.push_back(remaining);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int v = remaining; v >= 0; --v) {
        cur.push_back(v);
        recurse(slots, remaining - v, cur, out);
        cur.pop_back();
    }
}
}  // namespace

std::vector<MultiIndex> enumerate_multiindices(int slots, int degree) {
    sym_dimension(slots, degree);  // cap check
    std::vector<MultiIndex> out;
    MultiIndex cur;
    recurse(slots, degree, cur, out);
    return out;
}

}  // namespace wzw
