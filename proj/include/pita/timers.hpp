#ifndef PITA_TIMERS_HPP
#define PITA_TIMERS_HPP

#include <cstdint>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "pita/program.hpp"
#include "pita/trace.hpp"
#include "pita/types.hpp"

namespace pita {

// Per-flow timers managed through instructions. start on a running timer is
// a restart. Expiry produces one event per timer, ingested next cycle;
// expired timers stop unless restarted.
class TimerBank {
public:
    TimerBank(const ProtocolProgram& program, uint32_t event_width, CycleClock& clock,
              Trace& trace)
        : program_(program), event_width_(event_width), clock_(clock), trace_(trace) {}

    void apply(const TimerInstr& t) {
        PITA_CHECK(t.timer_id < program_.timers_per_flow, "timer id registered with the program");
        uint64_t key = (uint64_t(t.flow_id) << 8) | t.timer_id;
        auto it = armed_.find(key);
        if (it != armed_.end()) {
            expiries_.erase({it->second, t.flow_id, t.timer_id});
            armed_.erase(it);
        }
        if (t.op == TimerInstr::Stop) {
            if (trace_.enabled()) trace_.log(clock_.now, "timer", "stop", t.flow_id,
                                             "id=" + std::to_string(t.timer_id));
            return;
        }
        uint64_t expiry = clock_.now + t.delay;
        armed_[key] = expiry;
        expiries_.insert({expiry, t.flow_id, t.timer_id});
        if (trace_.enabled())
            trace_.log(clock_.now, "timer", "start", t.flow_id,
                       "id=" + std::to_string(t.timer_id) + " at=" + std::to_string(expiry));
    }

    // Phase 7: expired timers, in (flow, timer) order for same-cycle expiries.
    std::vector<Event> tick() {
        std::vector<Event> out;
        while (!expiries_.empty() && std::get<0>(*expiries_.begin()) <= clock_.now) {
            auto [expiry, flow, timer] = *expiries_.begin();
            expiries_.erase(expiries_.begin());
            armed_.erase((uint64_t(flow) << 8) | timer);
            Event e;
            e.flow_id = flow;
            e.event_type = program_.timer_event_types[timer];
            e.metadata = BitVector(event_width_);
            e.metadata.set_field(0, 8, timer);
            out.push_back(std::move(e));
            if (trace_.enabled())
                trace_.log(clock_.now, "timer", "expire", flow, "id=" + std::to_string(timer));
        }
        return out;
    }

    bool armed(FlowId f, uint8_t timer) const {
        return armed_.count((uint64_t(f) << 8) | timer) != 0;
    }

private:
    const ProtocolProgram& program_;
    uint32_t event_width_;
    CycleClock& clock_;
    Trace& trace_;
    std::map<uint64_t, uint64_t> armed_; // (flow<<8|timer) -> expiry
    std::set<std::tuple<uint64_t, FlowId, uint8_t>> expiries_;
};

} // namespace pita

#endif
