#ifndef DESTAB_THREADS_HPP
#define DESTAB_THREADS_HPP

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace destab {

/* Worker count for batch assembly loops: DESTAB_THREADS caps it, 0 or unset
   means hardware concurrency. */
inline unsigned thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("DESTAB_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0 && static_cast<unsigned>(v) < hw) return static_cast<unsigned>(v);
    }
    return hw;
}

/* Run fn(i) for i in [0, n) on up to thread_budget() workers. fn must only touch
   disjoint state per index. Exceptions propagate from the first failing index. */
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    unsigned workers = thread_budget();
    if (n <= 1 || workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    if (workers > static_cast<unsigned>(n)) workers = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = static_cast<int>(w); i < n; i += static_cast<int>(workers)) fn(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

} // namespace destab

#endif
