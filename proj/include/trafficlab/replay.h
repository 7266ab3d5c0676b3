#ifndef TRAFFICLAB_REPLAY_H
#define TRAFFICLAB_REPLAY_H

#include <unordered_set>
#include <vector>

#include "trafficlab/errors.h"
#include "trafficlab/rng.h"

namespace trafficlab {

struct Transition {
    std::vector<double> observation;
    double action = 0.0;  // executed binary action
    double reward = 0.0;
    std::vector<double> nextObservation;
};

// Fixed-capacity ring; oldest evicted first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(size_t capacity) : cap(capacity) {
        if (capacity == 0) throw InvalidArgument("replay capacity must be > 0");
        ring.reserve(std::min<size_t>(capacity, 1 << 16));
    }

    void push(Transition t) {
        if (ring.size() < cap) {
            ring.push_back(std::move(t));
        } else {
            ring[head] = std::move(t);
            head = (head + 1) % cap;
        }
    }

    size_t size() const { return ring.size(); }
    size_t capacity() const { return cap; }

    // oldest-first indexing, for tests of eviction order
    const Transition &at(size_t i) const {
        if (i >= ring.size()) throw InvalidArgument("replay index out of range");
        return ring[(head + i) % ring.size()];
    }

    // n distinct uniformly chosen transitions (Floyd's algorithm)
    std::vector<const Transition *> sample(size_t n, RngStream &rng) const {
        if (n > ring.size())
            throw InvalidArgument("cannot sample " + std::to_string(n) +
                                  " transitions from buffer of " +
                                  std::to_string(ring.size()));
        std::unordered_set<size_t> chosen;
        std::vector<const Transition *> out;
        out.reserve(n);
        for (size_t j = ring.size() - n; j < ring.size(); ++j) {
            size_t t = static_cast<size_t>(rng.uniformInt(0, static_cast<int64_t>(j)));
            size_t pick = chosen.insert(t).second ? t : j;
            if (pick != t) chosen.insert(pick);
            out.push_back(&ring[pick]);
        }
        return out;
    }

private:
    size_t cap;
    size_t head = 0;  // oldest slot once full
    std::vector<Transition> ring;
};

}  // namespace trafficlab

#endif
