#include "critdecay/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace critdecay {

namespace {
std::atomic<unsigned> g_threads{0};

unsigned from_environment()
{
    if (const char* env = std::getenv("CRITDECAY_THREADS")) {
        try {
            const long k = std::stol(env);
            if (k > 0)
                return static_cast<unsigned>(k);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}
} // namespace

void set_thread_count(unsigned k) { g_threads = k; }

unsigned thread_count()
{
    const unsigned k = g_threads.load();
    return k ? k : from_environment();
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body)
{
    const std::size_t workers = std::min<std::size_t>(thread_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w)
        pool.emplace_back(work);
    work();
    for (auto& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace critdecay
