#ifndef BHB_PARALLEL_HPP
#define BHB_PARALLEL_HPP

#include <bhb/errors.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace bhb {

/// Worker count: BHB_WORKERS if set, otherwise the hardware concurrency.
inline int default_workers()
{
    if (const char* env = std::getenv("BHB_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw ConfigError("BHB_WORKERS must be a positive integer, got \"" + std::string(env) + "\"");
        return static_cast<int>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// out[k] = fn(k) for k < n on at most `workers` threads. Tasks are claimed from a
/// shared counter and written by index, so the result never depends on scheduling.
/// If any task throws, the exception of the lowest-index failing task is rethrown
/// after all workers finish.
template <class R, class F>
std::vector<R> parallel_map(std::size_t n, F&& fn, int workers = 0)
{
    std::vector<R> out(n);
    if (workers <= 0)
        workers = default_workers();
    const std::size_t pool = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    if (pool <= 1) {
        for (std::size_t k = 0; k < n; ++k)
            out[k] = fn(k);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (std::size_t w = 0; w < pool; ++w)
        threads.emplace_back([&] {
            for (std::size_t k = next++; k < n; k = next++) {
                try {
                    out[k] = fn(k);
                } catch (...) {
                    errors[k] = std::current_exception();
                }
            }
        });
    for (auto& t : threads)
        t.join();
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

} // namespace bhb

#endif // BHB_PARALLEL_HPP
