#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// Grid kernels are embarrassingly parallel over nodes.  Every parallel entry
// point takes an ExecPolicy; Serial is a genuine plain-loop reference path
// kept for testing, and reductions use fixed chunking with a fixed summation
// order so that Serial and OpenMP results agree bitwise for any thread count.

namespace wzw::par {

enum class ExecPolicy { Serial, OpenMP };

inline ExecPolicy& default_policy() {
#ifdef _OPENMP
    static ExecPolicy p = ExecPolicy::OpenMP;
#else
    static ExecPolicy p = ExecPolicy::Serial;
#endif
    return p;
}

template <class Fn>
void for_index(std::size_t n, ExecPolicy policy, Fn&& fn) {
    if (policy == ExecPolicy::OpenMP) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i) fn(static_cast<std::size_t>(i));
        return;
#endif
    }
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

// Exceptions cannot cross an OpenMP region; collect and rethrow the first
// one (by index) after the loop.
template <class Fn>
void for_index_collect(std::size_t n, ExecPolicy policy, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
    for_index(n, policy, [&](std::size_t i) {
        try {
            fn(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline constexpr std::size_t reduction_chunk = 64;

// Chunked sum: partials are accumulated per fixed-size chunk (independent of
// the thread count) and combined in index order.
template <class Fn>
double chunked_sum(std::size_t n, ExecPolicy policy, Fn&& term) {
    const std::size_t nchunks = (n + reduction_chunk - 1) / reduction_chunk;
    std::vector<double> partial(nchunks, 0.0);
    for_index(nchunks, policy, [&](std::size_t c) {
        const std::size_t lo = c * reduction_chunk;
        const std::size_t hi = std::min(n, lo + reduction_chunk);
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += term(i);
        partial[c] = acc;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace wzw::par
