#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ripkit {

/// Resolves a requested worker count; 0 means all hardware threads.
inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, count) into at most `workers` contiguous chunks and runs
/// fn(chunk_index, begin, end) for each, one thread per chunk. Chunk
/// boundaries depend only on (count, chunks), so callers that reduce per-chunk
/// results in chunk order get schedule-independent answers. Returns the
/// number of chunks used. The first exception thrown by any chunk is
/// rethrown after all threads join.
template <class Fn>
std::size_t parallel_chunks(std::size_t count, unsigned workers, Fn&& fn) {
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(workers, count));
  if (chunks == 1) {
    fn(std::size_t{0}, std::size_t{0}, count);
    return 1;
  }
  std::vector<std::exception_ptr> errors(chunks);
  std::vector<std::thread> threads;
  threads.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t base = count / chunks;
    const std::size_t extra = count % chunks;
    const std::size_t begin = c * base + std::min(c, extra);
    const std::size_t end = begin + base + (c < extra ? 1 : 0);
    threads.emplace_back([&, c, begin, end] {
      try {
        fn(c, begin, end);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return chunks;
}

}  // namespace ripkit
