#ifndef PITA_PLE_HPP
#define PITA_PLE_HPP

#include <cstdint>
#include <vector>

#include "pita/context_table.hpp"
#include "pita/program.hpp"
#include "pita/trace.hpp"

namespace pita {

// The event-processing-engine host: accepts one dispatched event per cycle,
// evaluates the protocol program eagerly, and defers all effects (context
// writeback, instruction emission, event return) to
// dispatch_cycle + pipeline_depth(event_type). ple_depth_override replaces
// every per-type depth (microbenchmarks).
class PipelineModel {
public:
    struct Retirement {
        Event event;
        FlowContext ctx;
        std::vector<TransportInstruction> instrs;
    };

    PipelineModel(const ProtocolProgram& program, ContextTable& table, CycleClock& clock,
                  Trace& trace, uint32_t depth_override = 0)
        : program_(program), table_(table), clock_(clock), trace_(trace),
          depth_override_(depth_override) {}

    void accept(const Event& e);

    // Retires everything due this cycle, in flow-id order. Contexts are
    // written back here; the caller routes instructions and returns events.
    std::vector<Retirement> advance();

    size_t in_flight() const { return in_flight_.size(); }
    const ProtocolProgram& program() const { return program_; }

private:
    struct InFlight {
        uint64_t completion;
        Retirement r;
    };

    const ProtocolProgram& program_;
    ContextTable& table_;
    CycleClock& clock_;
    Trace& trace_;
    uint32_t depth_override_;
    std::vector<InFlight> in_flight_;
    uint64_t last_accept_cycle_ = ~0ull;
};

} // namespace pita

#endif
