#ifndef PITA_REASSEMBLY_HPP
#define PITA_REASSEMBLY_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "pita/config.hpp"
#include "pita/payload_memory.hpp"
#include "pita/trace.hpp"
#include "pita/types.hpp"

namespace pita {

// Per-flow chunked reassembly buffers with the shift/alignment cost model,
// plus flush-and-notify. Instructions queue per flow (program order matters:
// a flush may only execute after the add-segs it depends on). Two engines
// drain the queues concurrently on the dual-ported RAM: the insert engine at
// ceil(len/64) cycles (+1 when misaligned), the flush engine at one chunk
// per cycle.
class ReassemblyUnit {
public:
    using ReInstr = std::variant<AddDataSeg, FlushAndNotify>;
    using NotifySink = std::function<void(NotifyRecord&&)>;

    ReassemblyUnit(const SimConfig& cfg, PayloadMemory& mem, CycleClock& clock, Trace& trace);

    EnqueueOutcome enqueue(const ReInstr& instr);

    // Phase 6.
    void tick(const NotifySink& sink);

    uint32_t queue_occupancy(FlowId f) const;
    std::vector<FlowId> drain_dirty();

    uint64_t read_ptr(FlowId f) const;
    uint64_t bytes_placed() const { return bytes_placed_; }
    uint64_t bytes_flushed() const { return bytes_flushed_; }
    bool idle() const;

    // Invoked when an add-data-seg consumes its temporary-payload source.
    std::function<void(uint32_t addr)> on_consume;

    // Cycle cost of one insertion: C chunks streamed through the shift
    // pipeline, plus one for misalignment and boundary reads.
    static uint32_t add_seg_cost(uint64_t dest_offset, uint32_t length) {
        uint32_t chunks = (length + 63) / 64;
        bool aligned = (dest_offset % 64 == 0) && (length % 64 == 0);
        return chunks + (aligned ? 0 : 1);
    }
    static uint32_t flush_chunks(uint64_t read_ptr, uint32_t length) {
        return uint32_t((read_ptr + length - 1) / 64 - read_ptr / 64 + 1);
    }

private:
    struct FlowBuf {
        std::vector<uint8_t> ring;   // span bytes
        std::vector<uint8_t> valid;  // per-byte written mask (simulation bookkeeping)
        uint64_t read_ptr = 0;
        std::deque<ReInstr> q;
    };

    FlowBuf& buf(FlowId f);
    void exec_add(FlowId f, FlowBuf& b, const AddDataSeg& i);
    void exec_flush(FlowId f, FlowBuf& b, const FlushAndNotify& i);
    template <typename T>
    std::optional<FlowId> select(FlowId& rr);

    const SimConfig& cfg_;
    PayloadMemory& mem_;
    CycleClock& clock_;
    Trace& trace_;
    uint32_t span_;

    std::vector<std::optional<FlowBuf>> flows_;
    std::set<FlowId> work_;
    std::set<FlowId> dirty_;
    uint32_t add_busy_ = 0;
    uint32_t flush_busy_ = 0;
    FlowId add_rr_ = ~0u;
    FlowId flush_rr_ = ~0u;
    std::deque<NotifyRecord> pending_notify_; // due at .cycle

    uint64_t bytes_placed_ = 0;
    uint64_t bytes_flushed_ = 0;
};

} // namespace pita

#endif
