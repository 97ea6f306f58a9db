#ifndef PITA_PROGRAM_HPP
#define PITA_PROGRAM_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pita/types.hpp"

namespace pita {

// Output of one event-processing pipeline execution.
struct ProcessResult {
    FlowContext ctx;
    std::vector<TransportInstruction> instrs;
};

struct EventTypeSpec {
    std::string name;
    uint32_t pipeline_depth = 1; // >= 1
};

// The pluggable protocol: parser, per-event-type process functions,
// header-update rules, and timer declarations. process functions must be
// pure (identical event+context in, identical outputs); they see nothing
// but the event and the flow's context.
struct ProtocolProgram {
    std::string name;
    std::vector<EventTypeSpec> event_types;

    // One process function per event type, indexed by event_type.
    using ProcessFn = std::function<ProcessResult(const Event&, const FlowContext&)>;
    std::vector<ProcessFn> process;

    // Maps a raw packet or application request to an Event (without
    // payload_ref/arrival_cycle, which the datapath fills in). nullopt means
    // a malformed input: counted and dropped.
    using ParseFn = std::function<std::optional<Event>(const RawInput&)>;
    ParseFn parse;

    // Header-update rules, indexed by PktGenInstr::header_rule. Rule 0 is
    // always the identity. A rule receives the current header and the
    // payload bytes sent so far from this instruction, and produces the next
    // packet's header in place.
    using HeaderRuleFn =
        std::function<void(BitVector& header, uint64_t bytes_sent, const PktGenInstr&)>;
    std::vector<HeaderRuleFn> header_rules;

    uint32_t timers_per_flow = 0;
    std::vector<uint16_t> timer_event_types; // timer_id -> expiry event type

    // Emitted instruction lists are bounded by a per-program constant.
    uint32_t max_instrs_per_event = 8;

    // Fresh context for a flow (zeroed interior of the configured width).
    std::function<FlowContext()> init_context;

    uint32_t depth_of(uint16_t event_type) const {
        PITA_CHECK(event_type < event_types.size(), "known event type");
        return event_types[event_type].pipeline_depth;
    }
};

} // namespace pita

#endif
