#ifndef PITA_PROTOCOLS_BENCH_HPP
#define PITA_PROTOCOLS_BENCH_HPP

#include <memory>

#include "pita/config.hpp"
#include "pita/program.hpp"
#include "pita/wire.hpp"

namespace pita::bench {

// Null protocol for scheduler microbenchmarks: one event type, no
// instructions, context untouched. App request bytes: [0:4) flow id.
inline std::vector<uint8_t> encode_event(uint32_t flow) {
    std::vector<uint8_t> b(4);
    wire::put_u32(b.data(), flow);
    return b;
}

inline std::shared_ptr<ProtocolProgram> make_program(const SimConfig& cfg) {
    auto prog = std::make_shared<ProtocolProgram>();
    prog->name = "bench";
    prog->event_types = {{"ev", 1}};
    prog->process.resize(1);
    prog->process[0] = [](const Event&, const FlowContext& in) {
        return ProcessResult{in, {}};
    };
    uint32_t ew = cfg.event_width;
    prog->parse = [ew](const RawInput& raw) -> std::optional<Event> {
        if (raw.kind != RawInput::AppRequest || raw.bytes.size() < 4) return std::nullopt;
        Event e;
        e.flow_id = wire::get_u32(raw.bytes.data());
        e.event_type = 0;
        e.metadata = BitVector(ew);
        return e;
    };
    prog->header_rules.resize(1);
    prog->header_rules[0] = [](BitVector&, uint64_t, const PktGenInstr&) {};
    uint32_t cw = cfg.context_width;
    prog->init_context = [cw]() { return FlowContext(cw); };
    return prog;
}

} // namespace pita::bench

#endif
