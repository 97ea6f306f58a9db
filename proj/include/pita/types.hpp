#ifndef PITA_TYPES_HPP
#define PITA_TYPES_HPP

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "pita/bits.hpp"

namespace pita {

using FlowId = uint32_t;

// Opaque fixed-width per-flow protocol state. Only the protocol program
// reads or writes the interior; every datapath module treats it as bits.
struct FlowContext {
    BitVector bits;
    FlowContext() = default;
    explicit FlowContext(uint32_t width_bits) : bits(width_bits) {}
    bool operator==(const FlowContext& o) const { return bits == o.bits; }
};

// A tagged, flow-scoped unit of work: packet arrival, application request
// or timer expiry. Metadata is an opaque bit vector interpreted only by the
// protocol program. last_event is meaningful only after dequeue.
struct Event {
    FlowId flow_id = 0;
    uint16_t event_type = 0;
    BitVector metadata;
    std::optional<uint32_t> payload_ref; // address into temporary payload memory
    uint64_t arrival_cycle = 0;
    bool last_event = false;
};

struct PacingSpec {
    enum Mode : uint8_t { None, Rate, Credit } mode = None;
    uint32_t rate_fp = 0;   // bytes/cycle in 1/256 units
    uint32_t credit = 0;    // byte budget
};

// Fully parameterized packet-generation command. header evolves across
// segments via the program-registered header_rule. header_only instructions
// (total_len = 0) produce exactly one header-only packet; otherwise
// ceil(total_len/seg_size) packets, all seg_size payload except the last.
struct PktGenInstr {
    FlowId flow_id = 0;
    BitVector header;
    uint32_t data_addr = 0;
    uint32_t total_len = 0;
    uint32_t seg_size = 1;
    bool header_only = false;
    uint16_t header_rule = 0;
    uint64_t rule_arg0 = 0;
    uint64_t rule_arg1 = 0;
    PacingSpec pacing;

    bool valid() const {
        if (header_only) return total_len == 0;
        return total_len >= 1 && seg_size >= 1 && seg_size <= 9000;
    }
    uint32_t packet_count() const {
        if (header_only) return 1;
        return (total_len + seg_size - 1) / seg_size;
    }
};

struct AddDataSeg {
    FlowId flow_id = 0;
    uint32_t src_addr = 0;    // address into temporary payload memory
    uint32_t length = 0;      // >= 1
    uint64_t dest_offset = 0; // byte offset into the flow's reassembly window
};

struct FlushAndNotify {
    FlowId flow_id = 0;
    uint32_t length = 0;   // > 0
    uint64_t app_addr = 0; // destination byte address reported to the app
};

struct TimerInstr {
    enum Op : uint8_t { Start, Restart, Stop } op = Start;
    FlowId flow_id = 0;
    uint8_t timer_id = 0;
    uint64_t delay = 0; // cycles
};

using TransportInstruction =
    std::variant<PktGenInstr, AddDataSeg, FlushAndNotify, TimerInstr>;

// A packet on the wire: emitted by the packet generator at emit_cycle,
// carried through the link model, delivered to the peer's parser.
struct WirePacket {
    uint64_t emit_cycle = 0;
    FlowId flow = 0;
    std::vector<uint8_t> bytes;
    bool ecn = false;
};

// Application-visible delivery record produced by flush-and-notify.
struct NotifyRecord {
    uint64_t cycle = 0;
    FlowId flow = 0;
    uint64_t app_addr = 0;
    std::vector<uint8_t> bytes;
};

// Input to the programmable parser: a raw packet or an application request.
struct RawInput {
    enum Kind : uint8_t { Packet, AppRequest } kind = Packet;
    std::vector<uint8_t> bytes;
    bool ecn = false;
};

} // namespace pita

#endif
