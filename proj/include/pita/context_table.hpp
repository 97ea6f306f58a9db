#ifndef PITA_CONTEXT_TABLE_HPP
#define PITA_CONTEXT_TABLE_HPP

#include <cstdint>
#include <vector>

#include "pita/types.hpp"

namespace pita {

// Per-flow context storage (dual-ported RAM model). At most one read per
// cycle (the scheduler dispatches at most one event per cycle). Same-cycle
// writebacks from multiple retiring flows are applied in flow-id order.
class ContextTable {
public:
    ContextTable(uint32_t flow_count, uint32_t width_bits,
                 uint32_t read_latency = 1, uint32_t write_latency = 1)
        : contexts_(flow_count, FlowContext(width_bits)),
          read_latency_(read_latency),
          write_latency_(write_latency) {}

    const FlowContext& read(FlowId f) const { return contexts_[f]; }
    void write(FlowId f, const FlowContext& ctx) { contexts_[f] = ctx; }

    uint32_t read_latency() const { return read_latency_; }
    uint32_t write_latency() const { return write_latency_; }
    uint32_t width_bits() const {
        return contexts_.empty() ? 0 : uint32_t(contexts_[0].bits.bit_size());
    }

private:
    std::vector<FlowContext> contexts_;
    uint32_t read_latency_;
    uint32_t write_latency_;
};

} // namespace pita

#endif
