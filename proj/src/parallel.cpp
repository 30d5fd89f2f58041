// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "brwlab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace brwlab {
namespace {

int initial_thread_count() {
  if (const char* env = std::getenv("BRWLAB_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::atomic<int>& threads_setting() {
  static std::atomic<int> value{initial_thread_count()};
  return value;
}

}  // namespace

int thread_count() { return threads_setting().load(); }

void set_thread_count(int threads) {
  threads_setting().store(std::max(1, threads));
}

}  // namespace brwlab
