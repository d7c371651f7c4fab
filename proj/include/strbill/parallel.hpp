#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace strbill {

// Worker count: the request (0 = hardware concurrency), capped by the
// STRING_BILLIARDS_THREADS environment variable when set. Always >= 1.
unsigned thread_count(unsigned requested = 0);

// Calls body(i, worker) for every i < n. Items are handed out in chunks of
// `grain`; worker < the thread count used. The first exception is rethrown.
void parallel_for(std::size_t n, unsigned threads, std::size_t grain,
                  const std::function<void(std::size_t i, unsigned worker)>& body);

// SplitMix64 generator. Substreams keyed by (seed, index) are independent of
// the order in which they are drawn.
struct SplitMix64 {
    std::uint64_t state{0};

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g{seed};
    SplitMix64 h{g.next() ^ (index * 0xd1b54a32d192ed03ULL)};
    h.next();
    return h;
}

}  // namespace strbill
