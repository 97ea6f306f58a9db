#include "pita/ple.hpp"

#include <algorithm>

namespace pita {

void PipelineModel::accept(const Event& e) {
    PITA_CHECK(last_accept_cycle_ != clock_.now, "PLE accepts at most one event per cycle");
    last_accept_cycle_ = clock_.now;
    PITA_CHECK(e.event_type < program_.event_types.size(),
               "event type registered with the protocol program (flow " +
                   std::to_string(e.flow_id) + ", type " + std::to_string(e.event_type) + ")");
    uint32_t depth = depth_override_ ? depth_override_ : program_.depth_of(e.event_type);
    PITA_CHECK(depth >= 1, "pipeline depth >= 1");

    // Context read happens now; process is evaluated eagerly but its effects
    // are deferred to the completion cycle. Per-flow sequential consistency
    // holds structurally: at most one event of a flow is in flight.
    ProcessResult out = program_.process[e.event_type](e, table_.read(e.flow_id));
    PITA_CHECK(out.instrs.size() <= program_.max_instrs_per_event,
               "instruction emission bounded per event");
    InFlight inf;
    inf.completion = clock_.now + depth;
    inf.r.event = e;
    inf.r.ctx = std::move(out.ctx);
    inf.r.instrs = std::move(out.instrs);
    in_flight_.push_back(std::move(inf));
    if (trace_.enabled())
        trace_.log(clock_.now, "ple", "accept", e.flow_id,
                   "type=" + std::to_string(e.event_type) + " depth=" + std::to_string(depth));
}

std::vector<PipelineModel::Retirement> PipelineModel::advance() {
    std::vector<Retirement> due;
    for (auto it = in_flight_.begin(); it != in_flight_.end();) {
        if (it->completion == clock_.now) {
            due.push_back(std::move(it->r));
            it = in_flight_.erase(it);
        } else {
            ++it;
        }
    }
    // Same-cycle retirements settle in flow-id order.
    std::sort(due.begin(), due.end(), [](const Retirement& a, const Retirement& b) {
        return a.event.flow_id < b.event.flow_id;
    });
    for (auto& r : due) {
        table_.write(r.event.flow_id, r.ctx);
        if (trace_.enabled())
            trace_.log(clock_.now, "ple", "retire", r.event.flow_id,
                       "type=" + std::to_string(r.event.event_type) +
                           " instrs=" + std::to_string(r.instrs.size()));
    }
    return due;
}

} // namespace pita
