#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace vdkit {

// Index-ordered parallel map: results land at their input position, so the
// output is stable no matter how the workers interleave.
template <typename Out, typename In, typename Fn>
std::vector<Out> parallel_map(const std::vector<In>& items, Fn fn, unsigned workers) {
    std::vector<Out> results(items.size());
    if (items.empty()) return results;
    if (workers <= 1 || items.size() == 1) {
        for (size_t i = 0; i < items.size(); ++i) results[i] = fn(items[i]);
        return results;
    }
    workers = std::min<unsigned>(workers, static_cast<unsigned>(items.size()));

    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const size_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= items.size()) break;
                try {
                    results[i] = fn(items[i]);
                } catch (...) {
                    bool expected = false;
                    if (failed.compare_exchange_strong(expected, true)) {
                        first_error = std::current_exception();
                    }
                    break;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

}  // namespace vdkit
