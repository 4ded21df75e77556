#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace loewner {

// LOEWNER_LAB_THREADS if set and positive, else the hardware count.
inline unsigned thread_count() {
    if (const char* e = std::getenv("LOEWNER_LAB_THREADS")) {
        try {
            long v = std::stol(e);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    unsigned h = std::thread::hardware_concurrency();
    return h ? h : 1;
}

// Runs f(i) for i in [0, n). Work items must write only to their own slot, so the
// result does not depend on the thread count. The first exception is rethrown.
template <class F>
void parallel_for(std::size_t n, F f, unsigned threads = thread_count()) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex m;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(m);
                if (!err) err = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < std::min<std::size_t>(threads, n); ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace loewner
