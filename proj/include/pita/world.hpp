#ifndef PITA_WORLD_HPP
#define PITA_WORLD_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <vector>

#include "pita/config.hpp"
#include "pita/context_table.hpp"
#include "pita/event_store.hpp"
#include "pita/payload_memory.hpp"
#include "pita/pktgen.hpp"
#include "pita/ple.hpp"
#include "pita/program.hpp"
#include "pita/reassembly.hpp"
#include "pita/scheduler.hpp"
#include "pita/timers.hpp"
#include "pita/trace.hpp"

namespace pita {

struct WorldStats {
    uint64_t parse_errors = 0;
    uint64_t payload_pool_drops = 0;
    uint64_t ingest_stalls = 0;
};

// One datapath instance: ingress/parser, event store + scheduler, context
// table, processing engine, and the instruction-execution units, advanced
// one cycle per tick() in a fixed phase order:
//   (1) delivery -> parser -> ingest   (2) scheduler dispatch
//   (3) pipeline advance (writeback, emission, event return)
//   (4) instruction delivery           (5) packet generator (one beat)
//   (6) reassembly                     (7) timers
//   (8) backpressure recomputation
// Anything produced in cycle t (ingested event, timer expiry, re-queued
// flow) becomes actionable in cycle t+1.
class SimWorld {
public:
    SimWorld(const SimConfig& cfg, std::shared_ptr<const ProtocolProgram> program);

    void tick();

    // Harness inputs for the current cycle (call before tick()).
    void deliver_packet(std::vector<uint8_t> bytes, bool ecn);
    void submit_app(std::vector<uint8_t> bytes);

    // Harness outputs produced by the last tick(s).
    std::vector<WirePacket>& wire_out() { return wire_out_; }
    std::vector<NotifyRecord>& notify_out() { return notify_out_; }

    // Application-side memory access (writing payloads before submitting).
    PayloadMemory& memory() { return mem_; }
    uint32_t alloc_app_region(uint32_t len);

    const SimConfig& config() const { return cfg_; }
    CycleClock& clock() { return clock_; }
    Trace& trace() { return trace_; }
    Scheduler& scheduler() { return sched_; }
    EventStore& store() { return store_; }
    ContextTable& contexts() { return ctx_; }
    PacketGenerator& pktgen() { return pktgen_; }
    ReassemblyUnit& reassembly() { return reassm_; }
    TimerBank& timers() { return timers_; }
    const WorldStats& stats() const { return stats_; }
    const ProtocolProgram& program() const { return *program_; }
    size_t ingress_backlog() const { return ingress_.size(); }
    bool drained() const;

    // Instrumentation hooks (microbenchmarks).
    std::function<void(const Event&)> on_dispatch;
    std::function<void(const Event&, const FlowContext&, const PipelineModel::Retirement&)>
        on_retire;

private:
    struct IngressItem {
        bool is_event;
        RawInput raw;
        Event ev;
        uint64_t ready_cycle;
    };

    void phase_ingest();
    void deliver_instruction(const Event& src, TransportInstruction& ins, bool& consumed_payload);

    SimConfig cfg_;
    CycleClock clock_;
    Trace trace_;
    std::shared_ptr<const ProtocolProgram> program_;
    EventStore store_;
    Scheduler sched_;
    ContextTable ctx_;
    PipelineModel ple_;
    PayloadMemory mem_;
    PayloadPool pool_;
    PacketGenerator pktgen_;
    ReassemblyUnit reassm_;
    TimerBank timers_;

    std::deque<IngressItem> ingress_;
    std::vector<WirePacket> wire_out_;
    std::vector<NotifyRecord> notify_out_;
    WorldStats stats_;
    uint32_t app_alloc_ = 0;
};

} // namespace pita

#endif
