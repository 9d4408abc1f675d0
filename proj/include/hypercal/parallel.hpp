#ifndef HYPERCAL_PARALLEL_HPP
#define HYPERCAL_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace hypercal {

// Worker count used when an operation is not given one explicitly.
// 0 means "one thread". Set once by the CLI; library callers may pass
// their own count to parallel_for.
unsigned default_thread_count();
void set_default_thread_count(unsigned threads);

// Runs fn(begin, end) over a disjoint partition of [0, count). Each
// element is handled exactly once, so any function whose outputs go to
// per-element slots produces results independent of the thread count.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

inline void parallel_for(std::size_t count,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    parallel_for(count, default_thread_count(), fn);
}

} // namespace hypercal

#endif
