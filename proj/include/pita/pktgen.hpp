#ifndef PITA_PKTGEN_HPP
#define PITA_PKTGEN_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "pita/config.hpp"
#include "pita/payload_memory.hpp"
#include "pita/program.hpp"
#include "pita/trace.hpp"
#include "pita/types.hpp"

namespace pita {

enum class EnqueueOutcome { Accepted, QueueFull };

// Instruction-driven packet generation: per-flow instruction ring buffers,
// per-instruction payload prefetch with threshold replenishment, round-robin
// arbitration at packet granularity with preemption after a configurable
// quantum, and configurable header updates between segments.
//
// Timing model: one bus beat (<=64B) per cycle to the wire. A packet of S
// wire bytes takes ceil(S/64) beats. The handoff to the next instruction
// overlaps transmission when the finishing packet has >=2 beats; a
// single-beat final packet exposes one stall cycle.
class PacketGenerator {
public:
    using Sink = std::function<void(WirePacket&&)>;

    PacketGenerator(const SimConfig& cfg, const ProtocolProgram& program, PayloadMemory& mem,
                    CycleClock& clock, Trace& trace);

    EnqueueOutcome enqueue_instr(FlowId f, const PktGenInstr& instr);

    // Phase 5: memory deliveries, prefetch replenishment, one beat max.
    void tick(const Sink& sink);

    uint32_t queue_occupancy(FlowId f) const;
    bool has_work(FlowId f) const;

    // Flows whose instruction-queue occupancy changed since last drain
    // (backpressure recomputation).
    std::vector<FlowId> drain_dirty();

    uint64_t wire_bytes() const { return wire_bytes_; }
    uint64_t payload_bytes() const { return payload_bytes_; }
    uint64_t packets() const { return packets_; }
    uint64_t preemptions() const { return preemptions_; }

private:
    struct PendingInstr {
        PktGenInstr instr;
        uint64_t seq = 0;
        uint32_t payload_sent = 0;
        uint32_t fetch_off = 0;
        uint32_t outstanding = 0;
        std::deque<uint8_t> buf;
        BitVector header;
    };

    struct FlowState {
        std::deque<PendingInstr> queue;
        std::optional<PendingInstr> active;
        uint32_t buffered_total = 0; // buffered + outstanding bytes, all instructions
        uint64_t next_start_cycle = 0;
        uint32_t packets_this_activation = 0;
        // current packet
        bool in_packet = false;
        uint32_t pkt_wire_len = 0;
        uint32_t pkt_sent = 0;
        uint32_t pkt_payload_len = 0;
        std::vector<uint8_t> pkt_bytes;
        // pacing
        bool unlimited = true;
        bool credit_mode = false;
        uint64_t rate_fp = 0;
        uint64_t tokens_fp = 0;
        uint64_t tokens_cap_fp = 0;
    };

    FlowState& state(FlowId f);
    void issue_prefetch(FlowId f, FlowState& st, bool initial);
    bool try_start_packet(FlowId f, FlowState& st);
    bool emit_beat(FlowId f, FlowState& st, const Sink& sink);
    void finish_packet(FlowId f, FlowState& st, const Sink& sink);
    void update_work(FlowId f);
    uint32_t first_beat_payload(const FlowState& st) const;

    const SimConfig& cfg_;
    const ProtocolProgram& program_;
    PayloadMemory& mem_;
    CycleClock& clock_;
    Trace& trace_;
    uint32_t hdr_bytes_;
    uint32_t prefetch_cap_;

    std::vector<std::optional<FlowState>> flows_;
    std::set<FlowId> work_;
    std::set<FlowId> dirty_;
    std::optional<FlowId> locked_;
    FlowId rr_last_ = ~0u;
    uint64_t next_seq_ = 0;

    uint64_t wire_bytes_ = 0;
    uint64_t payload_bytes_ = 0;
    uint64_t packets_ = 0;
    uint64_t preemptions_ = 0;
};

} // namespace pita

#endif
