#ifndef PITA_SCHEDULER_HPP
#define PITA_SCHEDULER_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "pita/event_store.hpp"
#include "pita/trace.hpp"
#include "pita/types.hpp"

namespace pita {

enum class IngestOutcome { Accepted, QueueFull };

// Protocol-agnostic event scheduler. Tracks flow eligibility with the
// last-event bit piggybacked on dequeued events plus two per-flow arrival
// flags, so event return never re-reads the occupancy metadata. Eligible
// flows form a strict FIFO; backpressured flows park in a hold FIFO and
// rejoin in hold order on release.
//
// An event ingested (or a flow re-queued) in cycle t becomes dispatchable
// in cycle t+1, modeling the registered boundary between pipeline stages.
class Scheduler {
public:
    Scheduler(uint32_t flow_count, EventStore& store, CycleClock& clock, Trace& trace);

    // Phase 1: at most one ingest per cycle.
    IngestOutcome ingest(const Event& e);

    // Phase 2: at most one dispatch per cycle. Pops the head eligible flow
    // (if visible this cycle), dequeues its head event, marks it in flight.
    std::optional<Event> dispatch();

    // Phase 3: called when an event completes pipeline processing.
    void on_event_return(const Event& e);

    // Phase 8. While on, the flow is never dispatched; newly eligible flows
    // park in `held`. Release happens via release_unblocked().
    void set_backpressure(FlowId f, bool on);
    void release_unblocked();

    bool in_flight(FlowId f) const { return where_[f] == Where::InFlight; }
    bool backpressured(FlowId f) const { return bp_[f] != 0; }
    bool idle(FlowId f) const { return where_[f] == Where::Idle; }
    size_t eligible_size() const { return eligible_.size(); }
    size_t held_size() const { return held_.size(); }

    // True when some flow could be dispatched this cycle (work conservation).
    bool dispatchable_now() const {
        return !eligible_.empty() && eligible_.front().since < clock_.now;
    }

    uint64_t ingested() const { return n_ingested_; }
    uint64_t dispatched() const { return n_dispatched_; }
    uint64_t returned() const { return n_returned_; }

private:
    enum class Where : uint8_t { Idle, Eligible, Held, InFlight };
    struct Entry {
        FlowId flow;
        uint64_t since; // cycle the flow was appended
    };

    void enqueue_flow(FlowId f);
    void remove_from(std::deque<Entry>& q, FlowId f);

    EventStore& store_;
    CycleClock& clock_;
    Trace& trace_;
    std::deque<Entry> eligible_;
    std::deque<Entry> held_;
    std::vector<Where> where_;
    std::vector<uint8_t> arrived_since_dispatch_; // flag A
    std::vector<uint8_t> arrived_while_idle_;     // flag B, consumed on enqueue
    std::vector<uint8_t> bp_;
    uint64_t last_ingest_cycle_ = ~0ull;
    uint64_t last_dispatch_cycle_ = ~0ull;
    uint64_t n_ingested_ = 0, n_dispatched_ = 0, n_returned_ = 0;
    bool any_held_release_ = false;
};

} // namespace pita

#endif
