#include "hypercal/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hypercal {

namespace {
std::atomic<unsigned> g_threads{1};
}

unsigned default_thread_count() { return g_threads.load(); }

void set_default_thread_count(unsigned threads) {
    g_threads.store(threads == 0 ? 1u : threads);
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
    if (count == 0)
        return;
    if (threads == 0)
        threads = 1;
    const std::size_t n_workers =
        std::min<std::size_t>(threads, count);
    if (n_workers <= 1) {
        fn(0, count);
        return;
    }

    const std::size_t chunk = (count + n_workers - 1) / n_workers;
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < n_workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end)
            break;
        pool.emplace_back([&, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace hypercal
