#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hspec {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// tolerance for |z| <= 1 and |phi| <= 1 checks
inline constexpr double kValTol = 1e-12;

// Pairwise (cascade) summation. The reduction tree depends only on the
// length of the input, so results are reproducible regardless of threads.
template <typename T>
T pairwise_sum(std::span<const T> xs) {
    constexpr std::size_t kLeaf = 16;
    if (xs.size() <= kLeaf) {
        T acc{};
        for (const T& x : xs) acc += x;
        return acc;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& xs) {
    return pairwise_sum(std::span<const T>(xs));
}

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

// Number of worker threads: HSPEC_THREADS if set and positive, else hardware
// concurrency.
unsigned worker_count();

// Runs fn(i) for i in [0, n). Each index is handled by exactly one worker;
// callers write results into per-index slots so output is thread-independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre(std::size_t n);

}  // namespace hspec
