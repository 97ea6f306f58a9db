#include "pita/world.hpp"

#include <algorithm>

namespace pita {

SimWorld::SimWorld(const SimConfig& cfg, std::shared_ptr<const ProtocolProgram> program)
    : cfg_(cfg),
      program_(std::move(program)),
      store_(cfg.flow_count, cfg.event_buffer_depth),
      sched_(cfg.flow_count, store_, clock_, trace_),
      ctx_(cfg.flow_count, cfg.context_width),
      ple_(*program_, ctx_, clock_, trace_, cfg.ple_depth_override),
      mem_(cfg.payload_mem_bytes, cfg.mem_latency, cfg.mem_bandwidth),
      pool_(mem_, cfg.payload_mem_bytes - cfg.temp_pool_chunks * 64, cfg.temp_pool_chunks * 64),
      pktgen_(cfg_, *program_, mem_, clock_, trace_),
      reassm_(cfg_, mem_, clock_, trace_),
      timers_(*program_, cfg.event_width, clock_, trace_) {
    PITA_CHECK(program_->process.size() == program_->event_types.size(),
               "one process function per event type");
    if (program_->init_context)
        for (FlowId f = 0; f < cfg_.flow_count; ++f) ctx_.write(f, program_->init_context());
    reassm_.on_consume = [this](uint32_t addr) { pool_.release(addr); };
}

uint32_t SimWorld::alloc_app_region(uint32_t len) {
    uint32_t addr = app_alloc_;
    PITA_CHECK(uint64_t(addr) + len <= pool_.base(),
               "application region does not collide with the temporary payload pool");
    app_alloc_ += len;
    return addr;
}

void SimWorld::deliver_packet(std::vector<uint8_t> bytes, bool ecn) {
    IngressItem item;
    item.is_event = false;
    item.raw.kind = RawInput::Packet;
    item.raw.bytes = std::move(bytes);
    item.raw.ecn = ecn;
    item.ready_cycle = clock_.now;
    ingress_.push_back(std::move(item));
}

void SimWorld::submit_app(std::vector<uint8_t> bytes) {
    IngressItem item;
    item.is_event = false;
    item.raw.kind = RawInput::AppRequest;
    item.raw.bytes = std::move(bytes);
    item.ready_cycle = clock_.now;
    ingress_.push_back(std::move(item));
}

bool SimWorld::drained() const {
    return ingress_.empty() && sched_.ingested() == sched_.returned() && ple_.in_flight() == 0;
}

// Phase 1: one item per cycle through the parser into the event store.
void SimWorld::phase_ingest() {
    if (ingress_.empty() || ingress_.front().ready_cycle > clock_.now) return;
    IngressItem& item = ingress_.front();
    if (!item.is_event) {
        auto ev = program_->parse(item.raw);
        if (!ev) {
            ++stats_.parse_errors;
            ingress_.pop_front();
            return; // the malformed input consumed this cycle's parser slot
        }
        if (item.raw.kind == RawInput::Packet && item.raw.bytes.size() > cfg_.header_bytes()) {
            // data-carrying packet: payload goes to the temporary pool
            uint32_t plen = uint32_t(item.raw.bytes.size()) - cfg_.header_bytes();
            auto addr = pool_.alloc(item.raw.bytes.data() + cfg_.header_bytes(), plen);
            if (!addr) {
                ++stats_.payload_pool_drops;
                ingress_.pop_front();
                return;
            }
            ev->payload_ref = addr;
        }
        item.is_event = true;
        item.ev = std::move(*ev);
        item.raw.bytes.clear();
    }
    item.ev.arrival_cycle = clock_.now;
    if (sched_.ingest(item.ev) == IngestOutcome::Accepted) {
        ingress_.pop_front();
    } else {
        ++stats_.ingest_stalls; // flow FIFO full: the head stalls, retried next cycle
    }
}

void SimWorld::deliver_instruction(const Event& src, TransportInstruction& ins,
                                   bool& consumed_payload) {
    // instructions act on the emitting event's flow
    std::visit([&](auto& i) { i.flow_id = src.flow_id; }, ins);
    if (auto* p = std::get_if<PktGenInstr>(&ins)) {
        PITA_CHECK(pktgen_.enqueue_instr(p->flow_id, *p) == EnqueueOutcome::Accepted,
                   "pktgen instruction queue overflow: atomic event processing violated (flow " +
                       std::to_string(p->flow_id) + ")");
    } else if (auto* a = std::get_if<AddDataSeg>(&ins)) {
        if (src.payload_ref && a->src_addr >= *src.payload_ref) consumed_payload = true;
        PITA_CHECK(reassm_.enqueue(*a) == EnqueueOutcome::Accepted,
                   "reassembly instruction queue overflow: atomic event processing violated (flow " +
                       std::to_string(a->flow_id) + ")");
    } else if (auto* fl = std::get_if<FlushAndNotify>(&ins)) {
        PITA_CHECK(reassm_.enqueue(*fl) == EnqueueOutcome::Accepted,
                   "reassembly instruction queue overflow: atomic event processing violated (flow " +
                       std::to_string(fl->flow_id) + ")");
    } else if (auto* t = std::get_if<TimerInstr>(&ins)) {
        timers_.apply(*t);
    }
}

void SimWorld::tick() {
    // (1) network/app delivery -> parser -> event-store ingest
    phase_ingest();

    // (2) scheduler dispatch
    if (auto ev = sched_.dispatch()) {
        if (on_dispatch) on_dispatch(*ev);
        ple_.accept(*ev);
    }

    // (3) pipeline advance + (4) instruction delivery
    for (auto& r : ple_.advance()) {
        if (on_retire) on_retire(r.event, r.ctx, r);
        bool consumed_payload = false;
        for (auto& ins : r.instrs) deliver_instruction(r.event, ins, consumed_payload);
        if (r.event.payload_ref && !consumed_payload) pool_.release(*r.event.payload_ref);
        sched_.on_event_return(r.event);
    }

    // (5) packet generation: at most one bus beat to the wire
    pktgen_.tick([this](WirePacket&& p) { wire_out_.push_back(std::move(p)); });

    // (6) reassembly: insert + flush engines
    reassm_.tick([this](NotifyRecord&& n) { notify_out_.push_back(std::move(n)); });

    // (7) timers: expiries become events next cycle
    for (auto& ev : timers_.tick()) {
        IngressItem item;
        item.is_event = true;
        item.ev = std::move(ev);
        item.ready_cycle = clock_.now + 1;
        ingress_.push_back(std::move(item));
    }

    // (8) backpressure signal recomputation for flows whose queues changed
    auto pg_dirty = pktgen_.drain_dirty();
    auto ra_dirty = reassm_.drain_dirty();
    std::vector<FlowId> dirty;
    dirty.reserve(pg_dirty.size() + ra_dirty.size());
    std::merge(pg_dirty.begin(), pg_dirty.end(), ra_dirty.begin(), ra_dirty.end(),
               std::back_inserter(dirty));
    dirty.erase(std::unique(dirty.begin(), dirty.end()), dirty.end());
    for (FlowId f : dirty) {
        bool bp = pktgen_.queue_occupancy(f) > cfg_.pktgen_bp_threshold ||
                  reassm_.queue_occupancy(f) > cfg_.reassembly_bp_threshold;
        sched_.set_backpressure(f, bp);
    }
    sched_.release_unblocked();

    clock_.advance();
}

} // namespace pita
