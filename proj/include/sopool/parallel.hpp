#pragma once

#include <cstddef>
#include <functional>

namespace sopool {

/// Worker count: SOPOOL_THREADS if set (>= 1), else hardware concurrency.
std::size_t thread_cap();

/// While alive, parallel_for on this thread runs inline. Workers hold one
/// implicitly, so nested parallel_for calls never spawn more threads.
class SerialScope {
 public:
  SerialScope();
  ~SerialScope();
  SerialScope(const SerialScope&) = delete;
  SerialScope& operator=(const SerialScope&) = delete;
};

/// Runs body(i) for i in [0, n), split into contiguous static blocks across at
/// most thread_cap() threads. body must not depend on which thread runs it.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t min_per_thread = 1);

}  // namespace sopool
