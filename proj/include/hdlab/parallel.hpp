#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <thread>
#include <vector>

namespace hdlab {

/// Splits [0, n) into at most `workers` contiguous chunks and runs
/// `body(begin, end, chunk)` on each, one thread per chunk. Chunk boundaries
/// never influence results as long as `body` derives its randomness from the
/// item index.
template <class Body>
void parallel_chunks(std::uint64_t n, unsigned workers, Body&& body) {
  const std::uint64_t chunks =
      std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers == 0 ? 1 : workers, n));
  if (chunks == 1) {
    body(std::uint64_t{0}, n, std::size_t{0});
    return;
  }
  std::vector<std::jthread> threads;
  threads.reserve(chunks);
  for (std::uint64_t c = 0; c < chunks; ++c) {
    const std::uint64_t begin = n * c / chunks;
    const std::uint64_t end = n * (c + 1) / chunks;
    threads.emplace_back([&body, begin, end, c] { body(begin, end, static_cast<std::size_t>(c)); });
  }
}

/// Counts the indices in [0, n) for which `predicate(i, scratch)` holds.
/// `make_scratch()` builds per-thread working storage.
template <class MakeScratch, class Predicate>
std::uint64_t parallel_count(std::uint64_t n, unsigned workers, MakeScratch&& make_scratch,
                             Predicate&& predicate) {
  std::vector<std::uint64_t> partial(std::max(1u, workers), 0);
  parallel_chunks(n, workers, [&](std::uint64_t begin, std::uint64_t end, std::size_t chunk) {
    auto scratch = make_scratch();
    std::uint64_t count = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
      if (predicate(i, scratch)) ++count;
    }
    partial[chunk] = count;
  });
  std::uint64_t total = 0;
  for (auto c : partial) total += c;
  return total;
}

/// Evaluates `fn(i, scratch)` for every index and stores the results in
/// index order, so any later reduction is order-deterministic.
template <class T, class MakeScratch, class Fn>
std::vector<T> parallel_map(std::uint64_t n, unsigned workers, MakeScratch&& make_scratch, Fn&& fn) {
  std::vector<T> out(n);
  parallel_chunks(n, workers, [&](std::uint64_t begin, std::uint64_t end, std::size_t) {
    auto scratch = make_scratch();
    for (std::uint64_t i = begin; i < end; ++i) out[i] = fn(i, scratch);
  });
  return out;
}

}  // namespace hdlab
