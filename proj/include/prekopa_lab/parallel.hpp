#pragma once

// Worker dispatch with thread-count-independent results.
//
// Workers only ever write into index-addressed slots; every reduction over
// those slots goes through pairwise_sum, whose tree shape depends on the
// length of the buffer alone.

#include <algorithm>
#include <atomic>
#include <complex>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace prekopa {

namespace detail {
inline std::atomic<int>& thread_count_slot() {
  static std::atomic<int> count{1};
  return count;
}
inline thread_local bool in_parallel_region = false;
}  // namespace detail

inline void set_thread_count(int n) { detail::thread_count_slot().store(std::max(1, n)); }
inline int thread_count() { return detail::thread_count_slot().load(); }

/// Calls fn(i) for i in [0, count). Nested calls run serially on the
/// calling worker. If several indices throw, the lowest index wins.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(thread_count());
  if (workers <= 1 || count <= 1 || detail::in_parallel_region) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t used = std::min(workers, count);
  std::vector<std::exception_ptr> errors(used);
  std::vector<std::size_t> error_index(used, count);
  std::vector<std::thread> pool;
  pool.reserve(used);
  for (std::size_t w = 0; w < used; ++w) {
    pool.emplace_back([&, w] {
      detail::in_parallel_region = true;
      const std::size_t begin = count * w / used;
      const std::size_t end = count * (w + 1) / used;
      for (std::size_t i = begin; i < end; ++i) {
        try {
          fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
          error_index[w] = i;
          break;
        }
      }
      detail::in_parallel_region = false;
    });
  }
  for (auto& t : pool) t.join();
  std::size_t first = used;
  for (std::size_t w = 0; w < used; ++w) {
    if (errors[w] && (first == used || error_index[w] < error_index[first])) first = w;
  }
  if (first != used) std::rethrow_exception(errors[first]);
}

/// Fixed-shape tree summation: halves down to blocks of at most 8 terms.
template <class T>
T pairwise_sum(std::span<const T> values) {
  if (values.size() <= 8) {
    T acc{};
    for (const auto& v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

template <class T>
T pairwise_sum(const std::vector<T>& values) {
  return pairwise_sum(std::span<const T>(values));
}

}  // namespace prekopa
