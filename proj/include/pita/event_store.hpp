#ifndef PITA_EVENT_STORE_HPP
#define PITA_EVENT_STORE_HPP

#include <cstdint>
#include <vector>

#include "pita/types.hpp"

namespace pita {

// Per-flow event FIFOs: a pool of ring buffers plus head/tail pointer and
// occupancy arrays (the three dual-ported RAMs). At most one insert and one
// dequeue per cycle overall.
class EventStore {
public:
    EventStore(uint32_t flow_count, uint32_t depth)
        : depth_(depth),
          buffers_(size_t(flow_count) * depth),
          head_(flow_count, 0),
          tail_(flow_count, 0),
          occupancy_(flow_count, 0) {}

    uint32_t depth() const { return depth_; }
    uint32_t occupancy(FlowId f) const { return occupancy_[f]; }
    bool full(FlowId f) const { return occupancy_[f] == depth_; }
    bool empty(FlowId f) const { return occupancy_[f] == 0; }

    // Returns false when the flow's ring is full; the caller decides whether
    // to stall or drop — the store never silently drops.
    bool insert(FlowId f, const Event& e) {
        if (full(f)) return false;
        buffers_[size_t(f) * depth_ + tail_[f]] = e;
        tail_[f] = (tail_[f] + 1) & (depth_ - 1);
        ++occupancy_[f];
        return true;
    }

    // Dequeues the head event and tags its last-event bit from the occupancy
    // counter (occupancy after dequeue == 0 means it was the final queued
    // event for the flow).
    Event dequeue(FlowId f) {
        PITA_CHECK(!empty(f), "event store dequeue from non-empty flow queue");
        Event e = buffers_[size_t(f) * depth_ + head_[f]];
        head_[f] = (head_[f] + 1) & (depth_ - 1);
        --occupancy_[f];
        e.last_event = (occupancy_[f] == 0);
        return e;
    }

private:
    uint32_t depth_;
    std::vector<Event> buffers_;
    std::vector<uint32_t> head_;
    std::vector<uint32_t> tail_;
    std::vector<uint32_t> occupancy_;
};

} // namespace pita

#endif
