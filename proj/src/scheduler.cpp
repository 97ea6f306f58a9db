#include "pita/scheduler.hpp"

#include <algorithm>

namespace pita {

Scheduler::Scheduler(uint32_t flow_count, EventStore& store, CycleClock& clock, Trace& trace)
    : store_(store),
      clock_(clock),
      trace_(trace),
      where_(flow_count, Where::Idle),
      arrived_since_dispatch_(flow_count, 0),
      arrived_while_idle_(flow_count, 0),
      bp_(flow_count, 0) {}

void Scheduler::enqueue_flow(FlowId f) {
    arrived_while_idle_[f] = 0; // consumed by the enqueue
    if (bp_[f]) {
        where_[f] = Where::Held;
        held_.push_back({f, clock_.now});
        if (trace_.enabled())
            trace_.log(clock_.now, "sched", "hold", f, "occ=" + std::to_string(store_.occupancy(f)));
    } else {
        where_[f] = Where::Eligible;
        eligible_.push_back({f, clock_.now});
    }
}

IngestOutcome Scheduler::ingest(const Event& e) {
    PITA_CHECK(last_ingest_cycle_ != clock_.now, "at most one ingest per cycle");
    FlowId f = e.flow_id;
    if (store_.full(f)) return IngestOutcome::QueueFull;
    last_ingest_cycle_ = clock_.now;
    store_.insert(f, e);
    ++n_ingested_;
    switch (where_[f]) {
        case Where::Idle:
            arrived_while_idle_[f] = 1;
            enqueue_flow(f);
            break;
        case Where::InFlight:
            arrived_since_dispatch_[f] = 1;
            break;
        case Where::Eligible:
        case Where::Held:
            break; // flow already queued; the event just joins its FIFO
    }
    if (trace_.enabled())
        trace_.log(clock_.now, "sched", "ingest", f, "occ=" + std::to_string(store_.occupancy(f)));
    return IngestOutcome::Accepted;
}

std::optional<Event> Scheduler::dispatch() {
    PITA_CHECK(last_dispatch_cycle_ != clock_.now, "at most one dispatch per cycle");
    if (eligible_.empty() || eligible_.front().since >= clock_.now) return std::nullopt;
    last_dispatch_cycle_ = clock_.now;
    Entry head = eligible_.front();
    eligible_.pop_front();
    FlowId f = head.flow;
    PITA_CHECK(!store_.empty(f), "eligible flow has a queued event");
    Event e = store_.dequeue(f);
    where_[f] = Where::InFlight;
    arrived_since_dispatch_[f] = 0;
    ++n_dispatched_;
    if (trace_.enabled())
        trace_.log(clock_.now, "sched", "dispatch", f,
                   "occ=" + std::to_string(store_.occupancy(f)) +
                       " last=" + std::to_string(e.last_event));
    return e;
}

void Scheduler::on_event_return(const Event& e) {
    FlowId f = e.flow_id;
    PITA_CHECK(where_[f] == Where::InFlight, "event return for a flow in flight");
    ++n_returned_;
    bool requeue = !e.last_event || arrived_since_dispatch_[f];
    arrived_since_dispatch_[f] = 0;
    where_[f] = Where::Idle;
    if (requeue) enqueue_flow(f);
    if (trace_.enabled())
        trace_.log(clock_.now, "sched", "return", f, "requeue=" + std::to_string(requeue));
}

void Scheduler::remove_from(std::deque<Entry>& q, FlowId f) {
    auto it = std::find_if(q.begin(), q.end(), [f](const Entry& e) { return e.flow == f; });
    PITA_CHECK(it != q.end(), "flow present in scheduler queue");
    q.erase(it);
}

void Scheduler::set_backpressure(FlowId f, bool on) {
    if (bp_[f] == (on ? 1 : 0)) return;
    bp_[f] = on ? 1 : 0;
    if (on && where_[f] == Where::Eligible) {
        remove_from(eligible_, f);
        where_[f] = Where::Held;
        held_.push_back({f, clock_.now});
        if (trace_.enabled()) trace_.log(clock_.now, "sched", "hold", f, "");
    }
    if (!on) any_held_release_ = true;
}

void Scheduler::release_unblocked() {
    if (!any_held_release_ || held_.empty()) {
        any_held_release_ = false;
        return;
    }
    // Held flows rejoin `eligible` in the order they were held.
    std::deque<Entry> still_held;
    for (const Entry& h : held_) {
        if (bp_[h.flow]) {
            still_held.push_back(h);
        } else {
            where_[h.flow] = Where::Eligible;
            eligible_.push_back({h.flow, clock_.now});
            if (trace_.enabled()) trace_.log(clock_.now, "sched", "release", h.flow, "");
        }
    }
    held_.swap(still_held);
    any_held_release_ = false;
}

} // namespace pita
