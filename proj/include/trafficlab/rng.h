#ifndef TRAFFICLAB_RNG_H
#define TRAFFICLAB_RNG_H

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace trafficlab {

// Deterministic stream derivation: one master seed plus a tag (and optional
// indices) names a stream. The draw functions are hand-rolled on top of the
// standardized mt19937_64 engine so trajectories do not depend on libstdc++
// distribution internals.
class RngStream {
public:
    explicit RngStream(uint64_t seed) : engine(seed) {}

    static uint64_t deriveSeed(uint64_t master, std::string_view tag,
                               uint64_t a = 0, uint64_t b = 0) {
        uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag
        for (char ch : tag) {
            h ^= static_cast<unsigned char>(ch);
            h *= 0x100000001b3ULL;
        }
        uint64_t x = master;
        x = splitmix(x ^ h);
        x = splitmix(x ^ a);
        x = splitmix(x ^ b);
        return x;
    }

    static RngStream derive(uint64_t master, std::string_view tag,
                            uint64_t a = 0, uint64_t b = 0) {
        return RngStream(deriveSeed(master, tag, a, b));
    }

    uint64_t next() { return engine(); }

    // uniform in [0, 1)
    double u01() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return u01() < p; }

    // uniform integer in [lo, hi], inclusive; unbiased via masked rejection
    int64_t uniformInt(int64_t lo, int64_t hi) {
        const uint64_t range = static_cast<uint64_t>(hi - lo);
        if (range == 0) return lo;
        uint64_t mask = ~0ULL >> __builtin_clzll(range);
        uint64_t v;
        do {
            v = engine() & mask;
        } while (v > range);
        return lo + static_cast<int64_t>(v);
    }

    // standard normal via Box-Muller (no cached second value)
    double gauss() {
        double u1 = 1.0 - u01();
        double u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    static uint64_t splitmix(uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine;
};

}  // namespace trafficlab

#endif
