#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace bflow {

/// Worker-count policy. An explicit set_thread_count(n) with n >= 1 wins;
/// otherwise the BALANCEDFLOW_THREADS environment variable; otherwise the
/// hardware concurrency (capped at 8). Intended to be set once at startup.
void set_thread_count(int n);
int thread_count();

/// Deterministic chunked reduction: the index range [0, count) is split into
/// fixed-size chunks (config::kReduceChunk, independent of the worker count),
/// each chunk is reduced by per_chunk(begin, end, slot) into its own slot of
/// a pre-sized partial vector, and the partials are combined strictly in
/// chunk order. Results are therefore bit-identical for every worker count.
///
/// Partial must be default-constructible; combine(acc, partial) folds in
/// chunk order.
template <class Partial>
void chunked_reduce(std::size_t count, std::size_t chunk_size,
                    const std::function<void(std::size_t, std::size_t, Partial&)>& per_chunk,
                    const std::function<void(Partial&)>& combine);

// Implementation detail shared by the template: runs jobs 0..n_jobs-1 on the
// configured worker pool, each job at most once, order of execution free.
void run_jobs(std::size_t n_jobs, const std::function<void(std::size_t)>& job);

template <class Partial>
void chunked_reduce(std::size_t count, std::size_t chunk_size,
                    const std::function<void(std::size_t, std::size_t, Partial&)>& per_chunk,
                    const std::function<void(Partial&)>& combine) {
  if (count == 0) return;
  const std::size_t n_chunks = (count + chunk_size - 1) / chunk_size;
  std::vector<Partial> partials(n_chunks);
  run_jobs(n_chunks, [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    const std::size_t end = std::min(count, begin + chunk_size);
    per_chunk(begin, end, partials[c]);
  });
  for (std::size_t c = 0; c < n_chunks; ++c) combine(partials[c]);
}

}  // namespace bflow
