// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace brwlab {

/// Worker count used by every replica loop. Initialised from the
/// BRWLAB_THREADS environment variable, else the hardware concurrency.
int thread_count();
void set_thread_count(int threads);

/// Splits [0, n_items) into fixed chunks of `chunk` items and evaluates
/// fn(begin, end) for each. Results come back in chunk order, so a
/// sequential fold over them does not depend on the number of workers.
template <class Fn>
auto map_chunks(std::uint64_t n_items, std::uint64_t chunk, Fn&& fn)
    -> std::vector<decltype(fn(std::uint64_t{}, std::uint64_t{}))> {
  using Partial = decltype(fn(std::uint64_t{}, std::uint64_t{}));
  chunk = std::max<std::uint64_t>(chunk, 1);
  const std::uint64_t n_chunks = (n_items + chunk - 1) / chunk;
  std::vector<Partial> out(n_chunks);
  const auto workers = static_cast<std::uint64_t>(
      std::max(1, std::min<int>(thread_count(), static_cast<int>(std::min<std::uint64_t>(n_chunks, 1024)))));

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        const std::uint64_t begin = c * chunk;
        out[c] = fn(begin, std::min(n_items, begin + chunk));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_chunks);
        return;
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint64_t i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace brwlab
