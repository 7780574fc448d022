#include "relpend/parallel.hpp"

#include <atomic>

#include <omp.h>

namespace relpend {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int threads) noexcept { g_max_threads.store(threads < 0 ? 0 : threads); }

int max_threads() noexcept {
    const int n = g_max_threads.load();
    return n > 0 ? n : omp_get_max_threads();
}

namespace detail {

void parallel_for(std::size_t n, void (*body)(std::size_t, void*), void* ctx) {
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(max_threads())
    for (long long i = 0; i < count; ++i) {
        body(static_cast<std::size_t>(i), ctx);
    }
}

}  // namespace detail
}  // namespace relpend
