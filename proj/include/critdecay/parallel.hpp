#pragma once

#include <cstddef>
#include <functional>

namespace critdecay {

/// Number of worker threads used by scans. 0 means "ask the environment"
/// (CRITDECAY_THREADS, then hardware concurrency).
void set_thread_count(unsigned k);
unsigned thread_count();

/// Runs body(i) for i in [0, count). Each index is written by exactly one
/// worker, so callers that store into slot i get order-independent results.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace critdecay
