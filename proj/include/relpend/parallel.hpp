#pragma once

// Index-space map used by every grid evaluation in the library.
//
// Execution::serial is the reference loop the tests compare against;
// Execution::parallel distributes the same per-index work over OpenMP threads.
// Each index writes only its own slot, so both paths return bit-identical
// vectors regardless of scheduling.

#include <cstddef>
#include <exception>
#include <memory>
#include <type_traits>
#include <vector>

namespace relpend {

enum class Execution { serial, parallel };

/// Upper bound on OpenMP threads for Execution::parallel; 0 means the runtime default.
void set_max_threads(int threads) noexcept;
[[nodiscard]] int max_threads() noexcept;

namespace detail {
void parallel_for(std::size_t n, void (*body)(std::size_t, void*), void* ctx);
}  // namespace detail

/// out[i] = fn(i) for i in [0, n).
///
/// If any evaluation throws, the exception from the lowest failing index is
/// rethrown after the loop completes.
template <class Fn>
auto map_indices(std::size_t n, Fn&& fn, Execution exec = Execution::parallel)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
    using R = std::invoke_result_t<Fn&, std::size_t>;
    static_assert(!std::is_same_v<R, bool>, "vector<bool> slots share words; return char instead");
    std::vector<R> out(n);
    if (exec == Execution::serial) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }

    std::vector<std::exception_ptr> errors(n);
    struct Ctx {
        std::remove_reference_t<Fn>* fn;
        std::vector<R>* out;
        std::vector<std::exception_ptr>* errors;
    } ctx{std::addressof(fn), &out, &errors};
    detail::parallel_for(
        n,
        [](std::size_t i, void* raw) {
            auto* c = static_cast<Ctx*>(raw);
            try {
                (*c->out)[i] = (*c->fn)(i);
            } catch (...) {
                (*c->errors)[i] = std::current_exception();
            }
        },
        &ctx);
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace relpend
