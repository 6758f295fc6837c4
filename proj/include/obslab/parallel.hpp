#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace obslab {

// Worker count: OBSLAB_THREADS if set, else hardware concurrency.
std::size_t thread_count();
// Overrides the environment for the current process (0 restores it).
void set_thread_count(std::size_t n);

// Runs fn(i) for i in [0, n). Results must be written to per-index slots;
// the first failing index (lowest i) has its exception rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Generator seeded from (seed, stream, index) so draws do not depend on
// scheduling.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

}  // namespace obslab
