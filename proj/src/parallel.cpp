#include "shearflow/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace shearflow {

namespace {

std::atomic<int> override_cap{0};

int environment_cap() {
    if (const char* env = std::getenv("SHEARFLOW_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) {
                return v;
            }
        } catch (const std::exception&) {
            // fall through to the hardware default
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace

int thread_cap() {
    const int o = override_cap.load();
    return o > 0 ? o : environment_cap();
}

void set_thread_cap(int threads) { override_cap.store(std::max(0, threads)); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(thread_cap()), count);
    if (threads <= 1 || count < 8) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += threads) {
                    fn(i);
                }
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace shearflow
