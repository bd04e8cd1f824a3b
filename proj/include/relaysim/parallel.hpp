/*
   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace relaysim {

// First and second moments of N per-item statistics.
template <std::size_t N>
struct MomentSums {
  std::array<double, N> sum{};
  std::array<double, N> sum_sq{};
  std::uint64_t count = 0;
};

namespace detail {

// Items are processed in fixed-size chunks and chunk partials are folded in
// chunk order, so the totals are bit-identical for every worker count. The
// item function is called as fn(index, values) and must be safe to run from
// multiple threads.
inline constexpr std::uint64_t kReduceChunk = 8192;

template <std::size_t N, class ItemFn>
MomentSums<N> chunked_moment_reduce(std::uint64_t items, int workers, ItemFn&& fn) {
  const std::uint64_t chunks = (items + kReduceChunk - 1) / kReduceChunk;
  std::vector<MomentSums<N>> partials(static_cast<std::size_t>(chunks));

  auto run_chunk = [&](std::uint64_t c) {
    const std::uint64_t begin = c * kReduceChunk;
    const std::uint64_t end = std::min(items, begin + kReduceChunk);
    MomentSums<N>& part = partials[static_cast<std::size_t>(c)];
    std::array<double, N> values{};
    for (std::uint64_t i = begin; i < end; ++i) {
      fn(i, values);
      for (std::size_t j = 0; j < N; ++j) {
        part.sum[j] += values[j];
        part.sum_sq[j] += values[j] * values[j];
      }
    }
    part.count = end - begin;
  };

  const std::uint64_t pool_size =
      std::min<std::uint64_t>(static_cast<std::uint64_t>(workers > 0 ? workers : 1), chunks);
  if (pool_size <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(pool_size));
    for (std::uint64_t w = 0; w < pool_size; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
          run_chunk(c);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  MomentSums<N> total;
  for (const auto& part : partials) {
    for (std::size_t j = 0; j < N; ++j) {
      total.sum[j] += part.sum[j];
      total.sum_sq[j] += part.sum_sq[j];
    }
    total.count += part.count;
  }
  return total;
}

}  // namespace detail

}  // namespace relaysim
