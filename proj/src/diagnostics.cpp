#include "emcal/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

namespace emcal {

namespace {
std::ostream* g_warning_stream = &std::cerr;
std::mutex g_warning_mutex;
}  // namespace

std::ostream* set_warning_stream(std::ostream* os) {
    std::lock_guard lock(g_warning_mutex);
    return std::exchange(g_warning_stream, os);
}

void warn(const std::string& message) {
    std::lock_guard lock(g_warning_mutex);
    if (g_warning_stream) *g_warning_stream << "warning: " << message << '\n';
}

std::size_t worker_count() {
    if (const char* env = std::getenv("EMCAL_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::size_t error_index = n;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    // Report the lowest failing index so errors are reproducible.
                    std::lock_guard lock(error_mutex);
                    if (i < error_index) {
                        error_index = i;
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace emcal
