#pragma once

#include <cstddef>
#include <functional>

namespace mcvd {

int default_thread_count();

// Runs fn(chunk_index, begin, end) over [0, n) split into fixed-size chunks.
// Chunk boundaries depend only on (n, chunk_size), never on scheduling, so
// per-chunk outputs merged in chunk order give the same result for any
// thread count. The first exception thrown inside fn is rethrown after join.
void parallel_chunks(std::size_t n, std::size_t chunk_size, int n_threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

// One item per chunk: fn(item_index).
void parallel_items(std::size_t n, int n_threads,
                    const std::function<void(std::size_t)>& fn);

}  // namespace mcvd
