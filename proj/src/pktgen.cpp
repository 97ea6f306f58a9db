#include "pita/pktgen.hpp"

#include <algorithm>

namespace pita {

PacketGenerator::PacketGenerator(const SimConfig& cfg, const ProtocolProgram& program,
                                 PayloadMemory& mem, CycleClock& clock, Trace& trace)
    : cfg_(cfg), program_(program), mem_(mem), clock_(clock), trace_(trace),
      hdr_bytes_((cfg.header_width + 7) / 8),
      prefetch_cap_(cfg.prefetch_buffer_len * 64),
      flows_(cfg.flow_count) {}

PacketGenerator::FlowState& PacketGenerator::state(FlowId f) {
    PITA_CHECK(f < flows_.size(), "pktgen flow id in range");
    if (!flows_[f]) flows_[f].emplace();
    return *flows_[f];
}

void PacketGenerator::update_work(FlowId f) {
    const FlowState& st = *flows_[f];
    if (st.active || !st.queue.empty()) work_.insert(f);
    else work_.erase(f);
}

EnqueueOutcome PacketGenerator::enqueue_instr(FlowId f, const PktGenInstr& instr) {
    PITA_CHECK(instr.valid(), "pktgen instruction valid (total_len >= 1 unless header-only)");
    PITA_CHECK(instr.header.bit_size() == cfg_.header_width, "pktgen header width matches config");
    FlowState& st = state(f);
    if (st.queue.size() >= cfg_.instr_queue_depth) return EnqueueOutcome::QueueFull;
    PendingInstr p;
    p.instr = instr;
    p.seq = next_seq_++;
    p.header = instr.header;
    st.queue.push_back(std::move(p));
    dirty_.insert(f);
    update_work(f);
    // data fetching begins immediately on enqueue
    issue_prefetch(f, st, true);
    if (trace_.enabled())
        trace_.log(clock_.now, "pktgen", "enqueue", f,
                   "len=" + std::to_string(instr.total_len) +
                       " occ=" + std::to_string(st.queue.size()));
    return EnqueueOutcome::Accepted;
}

uint32_t PacketGenerator::queue_occupancy(FlowId f) const {
    if (f >= flows_.size() || !flows_[f]) return 0;
    return uint32_t(flows_[f]->queue.size());
}

bool PacketGenerator::has_work(FlowId f) const {
    return work_.count(f) != 0;
}

std::vector<FlowId> PacketGenerator::drain_dirty() {
    std::vector<FlowId> out(dirty_.begin(), dirty_.end());
    dirty_.clear();
    return out;
}

void PacketGenerator::issue_prefetch(FlowId f, FlowState& st, bool initial) {
    if (!initial && st.buffered_total >= prefetch_cap_ / 2) return;
    // Fill toward capacity in execution order: active instruction first,
    // then the queue. Requests are fixed 512B (the tail may be shorter).
    auto fetch_for = [&](PendingInstr& p) {
        if (p.instr.header_only) return;
        while (st.buffered_total < prefetch_cap_ && p.fetch_off < p.instr.total_len) {
            uint32_t n = std::min<uint32_t>(
                {512u, p.instr.total_len - p.fetch_off, prefetch_cap_ - st.buffered_total});
            mem_.issue_fetch(f, p.seq, p.instr.data_addr + p.fetch_off, n, clock_.now);
            p.fetch_off += n;
            p.outstanding += n;
            st.buffered_total += n;
        }
    };
    if (st.active) fetch_for(*st.active);
    for (auto& p : st.queue) {
        if (st.buffered_total >= prefetch_cap_) break;
        fetch_for(p);
    }
}

uint32_t PacketGenerator::first_beat_payload(const FlowState& st) const {
    uint32_t need = std::min<uint32_t>(cfg_.bus_width, st.pkt_wire_len);
    return need > hdr_bytes_ ? need - hdr_bytes_ : 0;
}

bool PacketGenerator::try_start_packet(FlowId f, FlowState& st) {
    if (clock_.now < st.next_start_cycle) return false;
    if (!st.active) {
        if (st.queue.empty()) return false;
        st.active = std::move(st.queue.front());
        st.queue.pop_front();
        dirty_.insert(f);
        st.packets_this_activation = 0;
        // pacing setup: the activated instruction's parameters take effect
        const PacingSpec& ps = st.active->instr.pacing;
        switch (ps.mode) {
            case PacingSpec::None:
                st.unlimited = true;
                st.credit_mode = false;
                break;
            case PacingSpec::Rate:
                st.unlimited = false;
                st.credit_mode = false;
                st.rate_fp = ps.rate_fp;
                st.tokens_cap_fp =
                    uint64_t(2 * (st.active->instr.seg_size + hdr_bytes_)) << 8;
                st.tokens_fp = std::min(st.tokens_fp, st.tokens_cap_fp);
                break;
            case PacingSpec::Credit:
                st.unlimited = false;
                st.credit_mode = true;
                st.rate_fp = 0;
                st.tokens_cap_fp = ~0ull;
                st.tokens_fp += uint64_t(ps.credit) << 8;
                break;
        }
    }
    PendingInstr& a = *st.active;
    st.pkt_payload_len = a.instr.header_only
                             ? 0
                             : std::min(a.instr.seg_size, a.instr.total_len - a.payload_sent);
    st.pkt_wire_len = hdr_bytes_ + st.pkt_payload_len;
    if (!st.unlimited && st.tokens_fp < (uint64_t(st.pkt_wire_len) << 8)) return false;
    if (a.buf.size() < first_beat_payload(st)) return false; // prefetch not ready
    if (!st.unlimited) st.tokens_fp -= uint64_t(st.pkt_wire_len) << 8;
    st.in_packet = true;
    st.pkt_sent = 0;
    st.pkt_bytes.clear();
    st.pkt_bytes.reserve(st.pkt_wire_len);
    return true;
}

bool PacketGenerator::emit_beat(FlowId f, FlowState& st, const Sink& sink) {
    PendingInstr& a = *st.active;
    uint32_t need = std::min<uint32_t>(cfg_.bus_width, st.pkt_wire_len - st.pkt_sent);
    uint32_t beat_end = st.pkt_sent + need;
    uint32_t pay_start = std::max(st.pkt_sent, hdr_bytes_);
    uint32_t pay_in_beat = beat_end > pay_start ? beat_end - pay_start : 0;
    if (a.buf.size() < pay_in_beat) return false; // underrun: wire bubble, stay locked
    for (uint32_t k = st.pkt_sent; k < beat_end; ++k) {
        if (k < hdr_bytes_) {
            st.pkt_bytes.push_back(a.header.bytes()[k]);
        } else {
            st.pkt_bytes.push_back(a.buf.front());
            a.buf.pop_front();
        }
    }
    st.buffered_total -= pay_in_beat;
    payload_bytes_ += pay_in_beat;
    wire_bytes_ += need;
    st.pkt_sent = beat_end;
    if (st.pkt_sent == st.pkt_wire_len) finish_packet(f, st, sink);
    return true;
}

void PacketGenerator::finish_packet(FlowId f, FlowState& st, const Sink& sink) {
    PendingInstr& a = *st.active;
    sink(WirePacket{clock_.now, f, std::move(st.pkt_bytes), false});
    st.pkt_bytes = {};
    ++packets_;
    ++st.packets_this_activation;
    a.payload_sent += st.pkt_payload_len;
    st.in_packet = false;
    bool single_beat = st.pkt_wire_len <= cfg_.bus_width;
    bool done = a.instr.header_only || a.payload_sent >= a.instr.total_len;
    if (trace_.enabled())
        trace_.log(clock_.now, "pktgen", "emit", f,
                   "bytes=" + std::to_string(st.pkt_wire_len) + " done=" + std::to_string(done));
    if (done) {
        PITA_CHECK(a.outstanding == 0 && a.buf.empty(),
                   "instruction consumed exactly its fetched payload");
        st.active.reset();
        st.packets_this_activation = 0;
        st.next_start_cycle = clock_.now + (single_beat ? 2 : 1);
    } else {
        // produce the next header via the configured rule
        PITA_CHECK(a.instr.header_rule < program_.header_rules.size(),
                   "pktgen header rule registered");
        program_.header_rules[a.instr.header_rule](a.header, a.payload_sent, a.instr);
        if (st.packets_this_activation >= cfg_.preempt_quantum && !st.queue.empty()) {
            // preempt: requeue with progress; the next instruction takes over
            st.queue.push_back(std::move(*st.active));
            st.active.reset();
            st.packets_this_activation = 0;
            st.next_start_cycle = clock_.now + (single_beat ? 2 : 1);
            ++preemptions_;
            dirty_.insert(f);
            if (trace_.enabled()) trace_.log(clock_.now, "pktgen", "preempt", f, "");
        }
    }
    locked_.reset();
    rr_last_ = f;
    update_work(f);
}

void PacketGenerator::tick(const Sink& sink) {
    // token refill for paced flows
    for (FlowId f : work_) {
        FlowState& st = *flows_[f];
        if (!st.unlimited && !st.credit_mode && st.rate_fp)
            st.tokens_fp = std::min(st.tokens_cap_fp, st.tokens_fp + st.rate_fp);
    }
    // memory deliveries
    for (auto& arr : mem_.tick(clock_.now)) {
        PITA_CHECK(arr.flow < flows_.size() && flows_[arr.flow], "fetch delivery targets a live flow");
        FlowState& st = *flows_[arr.flow];
        PendingInstr* p = nullptr;
        if (st.active && st.active->seq == arr.instr_seq) p = &*st.active;
        if (!p)
            for (auto& q : st.queue)
                if (q.seq == arr.instr_seq) { p = &q; break; }
        PITA_CHECK(p, "fetch delivery matches a pending instruction");
        p->buf.insert(p->buf.end(), arr.bytes.begin(), arr.bytes.end());
        PITA_CHECK(p->outstanding >= arr.bytes.size(), "outstanding fetch accounting");
        p->outstanding -= uint32_t(arr.bytes.size());
    }
    // prefetch replenishment below the half-capacity threshold
    for (FlowId f : work_) issue_prefetch(f, *flows_[f], false);

    // one bus beat
    if (locked_) {
        emit_beat(*locked_, *flows_[*locked_], sink);
        return;
    }
    if (work_.empty()) return;
    // round-robin packet-granular arbitration starting after rr_last_
    std::vector<FlowId> order;
    order.reserve(work_.size());
    auto it = work_.upper_bound(rr_last_);
    for (auto i = it; i != work_.end(); ++i) order.push_back(*i);
    for (auto i = work_.begin(); i != it; ++i) order.push_back(*i);
    for (FlowId f : order) {
        FlowState& st = *flows_[f];
        if (st.in_packet) continue; // only the locked flow may be mid-packet
        if (try_start_packet(f, st)) {
            locked_ = f;
            emit_beat(f, st, sink);
            return;
        }
    }
}

} // namespace pita
