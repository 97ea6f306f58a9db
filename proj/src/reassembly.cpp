#include "pita/reassembly.hpp"

namespace pita {

ReassemblyUnit::ReassemblyUnit(const SimConfig& cfg, PayloadMemory& mem, CycleClock& clock,
                               Trace& trace)
    : cfg_(cfg), mem_(mem), clock_(clock), trace_(trace),
      span_(cfg.reassembly_buffer_len * 64), flows_(cfg.flow_count) {}

ReassemblyUnit::FlowBuf& ReassemblyUnit::buf(FlowId f) {
    PITA_CHECK(f < flows_.size(), "reassembly flow id in range");
    if (!flows_[f]) {
        flows_[f].emplace();
        flows_[f]->ring.assign(span_, 0);
        flows_[f]->valid.assign(span_, 0);
    }
    return *flows_[f];
}

EnqueueOutcome ReassemblyUnit::enqueue(const ReInstr& instr) {
    FlowId f = std::visit([](const auto& i) { return i.flow_id; }, instr);
    FlowBuf& b = buf(f);
    if (b.q.size() >= cfg_.reassembly_queue_depth) return EnqueueOutcome::QueueFull;
    if (const auto* a = std::get_if<AddDataSeg>(&instr))
        PITA_CHECK(a->length >= 1, "add-data-seg length >= 1");
    if (const auto* fl = std::get_if<FlushAndNotify>(&instr))
        PITA_CHECK(fl->length > 0, "flush-and-notify length > 0");
    b.q.push_back(instr);
    work_.insert(f);
    dirty_.insert(f);
    return EnqueueOutcome::Accepted;
}

uint32_t ReassemblyUnit::queue_occupancy(FlowId f) const {
    if (f >= flows_.size() || !flows_[f]) return 0;
    return uint32_t(flows_[f]->q.size());
}

std::vector<FlowId> ReassemblyUnit::drain_dirty() {
    std::vector<FlowId> out(dirty_.begin(), dirty_.end());
    dirty_.clear();
    return out;
}

uint64_t ReassemblyUnit::read_ptr(FlowId f) const {
    if (f >= flows_.size() || !flows_[f]) return 0;
    return flows_[f]->read_ptr;
}

bool ReassemblyUnit::idle() const {
    return work_.empty() && add_busy_ == 0 && flush_busy_ == 0 && pending_notify_.empty();
}

void ReassemblyUnit::exec_add(FlowId f, FlowBuf& b, const AddDataSeg& i) {
    PITA_CHECK(i.dest_offset >= b.read_ptr,
               "add-data-seg above the read pointer (flow " + std::to_string(f) + ", offset " +
                   std::to_string(i.dest_offset) + " < read_ptr " + std::to_string(b.read_ptr) + ")");
    PITA_CHECK(i.dest_offset + i.length <= b.read_ptr + span_,
               "add-data-seg within the reassembly window (flow " + std::to_string(f) + ")");
    for (uint32_t k = 0; k < i.length; ++k) {
        uint64_t off = i.dest_offset + k;
        b.ring[off % span_] = mem_.at(i.src_addr + k);
        b.valid[off % span_] = 1;
    }
    bytes_placed_ += i.length;
    if (on_consume) on_consume(i.src_addr);
    if (trace_.enabled())
        trace_.log(clock_.now, "reassm", "addseg", f,
                   "off=" + std::to_string(i.dest_offset) + " len=" + std::to_string(i.length) +
                       " cost=" + std::to_string(add_seg_cost(i.dest_offset, i.length)));
}

void ReassemblyUnit::exec_flush(FlowId f, FlowBuf& b, const FlushAndNotify& i) {
    NotifyRecord rec;
    rec.flow = f;
    rec.app_addr = i.app_addr;
    rec.bytes.resize(i.length);
    for (uint32_t k = 0; k < i.length; ++k) {
        uint64_t off = b.read_ptr + k;
        PITA_CHECK(b.valid[off % span_],
                   "flush of written bytes only (flow " + std::to_string(f) + ", offset " +
                       std::to_string(off) + " unwritten)");
        rec.bytes[k] = b.ring[off % span_];
        b.valid[off % span_] = 0;
    }
    uint32_t chunks = flush_chunks(b.read_ptr, i.length);
    b.read_ptr += i.length; // monotone non-decreasing
    bytes_flushed_ += i.length;
    rec.cycle = clock_.now + chunks - 1; // one chunk output per cycle
    flush_busy_ = chunks;
    pending_notify_.push_back(std::move(rec));
    if (trace_.enabled())
        trace_.log(clock_.now, "reassm", "flush", f,
                   "len=" + std::to_string(i.length) + " chunks=" + std::to_string(chunks) +
                       " read_ptr=" + std::to_string(b.read_ptr));
}

template <typename T>
std::optional<FlowId> ReassemblyUnit::select(FlowId& rr) {
    if (work_.empty()) return std::nullopt;
    std::vector<FlowId> order;
    order.reserve(work_.size());
    auto it = work_.upper_bound(rr);
    for (auto i = it; i != work_.end(); ++i) order.push_back(*i);
    for (auto i = work_.begin(); i != it; ++i) order.push_back(*i);
    for (FlowId f : order) {
        const FlowBuf& b = *flows_[f];
        if (!b.q.empty() && std::holds_alternative<T>(b.q.front())) return f;
    }
    return std::nullopt;
}

void ReassemblyUnit::tick(const NotifySink& sink) {
    if (add_busy_ > 0) --add_busy_;
    if (flush_busy_ > 0) --flush_busy_;

    // flush engine first so a popped flush unblocks same-flow add-segs
    if (flush_busy_ == 0) {
        if (auto f = select<FlushAndNotify>(flush_rr_)) {
            FlowBuf& b = *flows_[*f];
            FlushAndNotify i = std::get<FlushAndNotify>(b.q.front());
            b.q.pop_front();
            dirty_.insert(*f);
            exec_flush(*f, b, i);
            flush_rr_ = *f;
            if (b.q.empty()) work_.erase(*f);
        }
    }
    if (add_busy_ == 0) {
        if (auto f = select<AddDataSeg>(add_rr_)) {
            FlowBuf& b = *flows_[*f];
            AddDataSeg i = std::get<AddDataSeg>(b.q.front());
            b.q.pop_front();
            dirty_.insert(*f);
            exec_add(*f, b, i);
            add_busy_ = add_seg_cost(i.dest_offset, i.length);
            add_rr_ = *f;
            if (b.q.empty()) work_.erase(*f);
        }
    }

    // deliver notify records whose last chunk left by this cycle
    while (!pending_notify_.empty() && pending_notify_.front().cycle <= clock_.now) {
        NotifyRecord rec = std::move(pending_notify_.front());
        pending_notify_.pop_front();
        if (trace_.enabled())
            trace_.log(rec.cycle, "reassm", "notify", rec.flow,
                       "addr=" + std::to_string(rec.app_addr) +
                           " bytes=" + std::to_string(rec.bytes.size()));
        sink(std::move(rec));
    }
}

} // namespace pita
