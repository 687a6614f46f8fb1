#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace kghier {

// Half-open index range [begin, end).
struct Chunk {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Splits [0, count) into `parts` contiguous chunks whose sizes differ by at
// most one. Empty chunks are produced when parts > count.
inline std::vector<Chunk> split_range(std::size_t count, std::size_t parts) {
  parts = std::max<std::size_t>(parts, 1);
  std::vector<Chunk> chunks(parts);
  const std::size_t base = count / parts;
  const std::size_t extra = count % parts;
  std::size_t at = 0;
  for (std::size_t i = 0; i < parts; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    chunks[i] = {at, at + len};
    at += len;
  }
  return chunks;
}

// Runs fn(chunk_index, chunk) for each chunk, one thread per chunk. The
// calling thread handles chunk 0. Exceptions from workers are rethrown
// after all threads joined (first one wins).
template <typename Fn>
void run_chunks(const std::vector<Chunk>& chunks, Fn&& fn) {
  std::vector<std::exception_ptr> errors(chunks.size());
  auto guarded = [&](std::size_t i) {
    try {
      fn(i, chunks[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> workers;
    workers.reserve(chunks.size());
    for (std::size_t i = 1; i < chunks.size(); ++i) {
      workers.emplace_back(guarded, i);
    }
    if (!chunks.empty()) guarded(0);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Worker budget: KGHIER_JOBS if set to a positive integer, otherwise the
// detected hardware concurrency (at least 1).
std::size_t default_jobs();

}  // namespace kghier
