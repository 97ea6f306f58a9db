#include "pita/protocols/tcp.hpp"

#include <algorithm>

#include "pita/wire.hpp"

namespace pita::tcp {

namespace {

enum : uint16_t { RuleIdentity = 0, RuleSeq = 1 };

struct Params {
    uint32_t mss, init_cwnd, dupack_thr, max_window, header_width, event_width, context_width;
    uint64_t rto;
};

BitVector make_header(const Params& pp, uint32_t flow, uint32_t seq, uint32_t ack, uint16_t len) {
    BitVector h(pp.header_width);
    wire::Header w;
    w.proto = wire::kProtoTcp;
    w.flow = uint16_t(flow);
    w.f0 = seq;
    w.f1 = ack;
    w.len = len;
    wire::encode(h, w);
    return h;
}

void push_ack_packet(const Params& pp, const TcpCtx& c, const Event& e,
                     std::vector<TransportInstruction>& out) {
    PktGenInstr p;
    p.header = make_header(pp, e.flow_id, c.snd_nxt, c.rcv_nxt, 0);
    p.header_only = true;
    p.total_len = 0;
    p.seg_size = pp.mss;
    p.header_rule = RuleIdentity;
    out.push_back(p);
}

void push_send(const Params& pp, TcpCtx& c, const Event& e, uint32_t seq, uint32_t len,
               std::vector<TransportInstruction>& out) {
    PktGenInstr p;
    p.header = make_header(pp, e.flow_id, seq, c.rcv_nxt, uint16_t(std::min(len, pp.mss)));
    p.data_addr = c.stream_base + seq;
    p.total_len = len;
    p.seg_size = pp.mss;
    p.header_rule = RuleSeq;
    p.rule_arg0 = seq;
    out.push_back(p);
}

void arm_rto(const Params& pp, TcpCtx& c, std::vector<TransportInstruction>& out) {
    TimerInstr t;
    t.op = TimerInstr::Restart;
    t.timer_id = 0;
    t.delay = pp.rto;
    out.push_back(t);
    c.rto_active = 1;
}

// sliding-window send: emit one instruction for min(cwnd, pending) bytes
void try_send(const Params& pp, TcpCtx& c, const Event& e,
              std::vector<TransportInstruction>& out) {
    uint32_t wnd = std::min(c.cwnd, pp.max_window);
    uint32_t inflight = c.snd_nxt - c.snd_una;
    if (inflight >= wnd || c.app_pending == 0) return;
    uint32_t len = std::min(c.app_pending, wnd - inflight);
    push_send(pp, c, e, c.snd_nxt, len, out);
    c.snd_nxt += len;
    c.app_pending -= len;
    arm_rto(pp, c, out);
}

void retransmit_head(const Params& pp, TcpCtx& c, const Event& e,
                     std::vector<TransportInstruction>& out) {
    uint32_t len = std::min(pp.mss, c.snd_nxt - c.snd_una);
    if (len == 0) return;
    push_send(pp, c, e, c.snd_una, len, out);
}

ProcessResult on_app_send(const Params& pp, const Event& e, const FlowContext& in) {
    ProcessResult r;
    r.ctx = in;
    TcpCtx c = in.bits.as<TcpCtx>();
    c.stream_base = uint32_t(e.metadata.get_field(32, 32));
    c.app_pending += uint32_t(e.metadata.get_field(0, 32));
    try_send(pp, c, e, r.instrs);
    r.ctx.bits.store(c);
    return r;
}

ProcessResult on_ack(const Params& pp, const Event& e, const FlowContext& in) {
    ProcessResult r;
    r.ctx = in;
    TcpCtx c = in.bits.as<TcpCtx>();
    uint32_t ackno = uint32_t(e.metadata.get_field(0, 32));
    if (ackno > c.snd_una) {
        c.snd_una = ackno;
        c.dup_acks = 0;
        if (c.in_recovery) {
            if (ackno >= c.recover) {
                c.in_recovery = 0;
                c.cwnd = std::max(c.ssthresh, pp.mss);
            } else {
                retransmit_head(pp, c, e, r.instrs); // partial ack
            }
        } else if (c.cwnd < c.ssthresh) {
            c.cwnd += pp.mss; // slow start
        } else {
            c.cwnd += std::max(1u, pp.mss * pp.mss / c.cwnd); // avoidance
        }
        if (c.snd_una == c.snd_nxt && c.app_pending == 0) {
            TimerInstr t;
            t.op = TimerInstr::Stop;
            t.timer_id = 0;
            r.instrs.push_back(t);
            c.rto_active = 0;
        } else {
            arm_rto(pp, c, r.instrs);
        }
        try_send(pp, c, e, r.instrs);
    } else if (c.snd_nxt > c.snd_una) {
        ++c.dup_acks;
        if (c.dup_acks == pp.dupack_thr && !c.in_recovery) {
            c.ssthresh = std::max(c.cwnd / 2, 2 * pp.mss);
            c.cwnd = std::max(c.ssthresh, pp.mss);
            c.in_recovery = 1;
            c.recover = c.snd_nxt;
            retransmit_head(pp, c, e, r.instrs); // fast retransmit
            arm_rto(pp, c, r.instrs);
        }
    }
    r.ctx.bits.store(c);
    return r;
}

ProcessResult on_data(const Params& pp, const Event& e, const FlowContext& in) {
    ProcessResult r;
    r.ctx = in;
    TcpCtx c = in.bits.as<TcpCtx>();
    uint32_t seq = uint32_t(e.metadata.get_field(0, 32));
    uint32_t len = uint32_t(e.metadata.get_field(32, 16));
    uint32_t end = seq + len;
    if (end > c.rcv_nxt && e.payload_ref) {
        if (seq <= c.rcv_nxt) {
            // in-order (possibly trimmed): place, merge buffered segments, flush
            uint32_t lo = c.rcv_nxt;
            AddDataSeg a;
            a.src_addr = *e.payload_ref + (lo - seq);
            a.length = end - lo;
            a.dest_offset = lo;
            r.instrs.push_back(a);
            c.rcv_nxt = end;
            bool progress = true;
            while (progress) {
                progress = false;
                for (int k = 0; k < 8; ++k) {
                    if (!(c.ooo_valid & (1u << k))) continue;
                    if (c.ooo_seq[k] <= c.rcv_nxt) {
                        uint32_t oend = c.ooo_seq[k] + c.ooo_len[k];
                        if (oend > c.rcv_nxt) c.rcv_nxt = oend;
                        c.ooo_valid &= uint8_t(~(1u << k));
                        progress = true;
                    }
                }
            }
            FlushAndNotify fl;
            fl.length = c.rcv_nxt - c.delivered;
            fl.app_addr = c.delivered;
            r.instrs.push_back(fl);
            c.delivered = c.rcv_nxt;
        } else {
            // out of order: buffer if the record table has room
            bool covered = false;
            for (int k = 0; k < 8; ++k)
                if ((c.ooo_valid & (1u << k)) && c.ooo_seq[k] <= seq &&
                    end <= c.ooo_seq[k] + c.ooo_len[k])
                    covered = true;
            if (!covered) {
                int slot = -1;
                for (int k = 0; k < 8; ++k)
                    if (!(c.ooo_valid & (1u << k))) { slot = k; break; }
                if (slot >= 0) {
                    c.ooo_valid |= uint8_t(1u << slot);
                    c.ooo_seq[slot] = seq;
                    c.ooo_len[slot] = uint16_t(len);
                    AddDataSeg a;
                    a.src_addr = *e.payload_ref;
                    a.length = len;
                    a.dest_offset = seq;
                    r.instrs.push_back(a);
                }
                // table full: drop; the duplicate ACK below forces retransmission
            }
        }
    }
    push_ack_packet(pp, c, e, r.instrs); // one ACK per received data packet
    r.ctx.bits.store(c);
    return r;
}

ProcessResult on_rto(const Params& pp, const Event& e, const FlowContext& in) {
    ProcessResult r;
    r.ctx = in;
    TcpCtx c = in.bits.as<TcpCtx>();
    if (c.snd_nxt > c.snd_una) {
        c.ssthresh = std::max(c.cwnd / 2, 2 * pp.mss);
        c.cwnd = pp.mss;
        c.dup_acks = 0;
        c.in_recovery = 0;
        retransmit_head(pp, c, e, r.instrs);
        arm_rto(pp, c, r.instrs);
    } else {
        c.rto_active = 0;
    }
    r.ctx.bits.store(c);
    return r;
}

} // namespace

std::vector<uint8_t> encode_app_send(uint32_t flow, uint32_t len, uint32_t stream_base) {
    std::vector<uint8_t> b(12);
    wire::put_u32(b.data(), flow);
    wire::put_u32(b.data() + 4, len);
    wire::put_u32(b.data() + 8, stream_base);
    return b;
}

std::shared_ptr<ProtocolProgram> make_program(const SimConfig& cfg) {
    auto prog = std::make_shared<ProtocolProgram>();
    Params pp{cfg.tcp_mss,
              cfg.tcp_init_cwnd_segs * cfg.tcp_mss,
              cfg.tcp_dupack_threshold,
              cfg.tcp_max_window,
              cfg.header_width,
              cfg.event_width,
              cfg.context_width,
              cfg.tcp_rto_cycles};

    prog->name = "tcp_aimd";
    prog->event_types = {{"app_send", 4}, {"data", 6}, {"ack", 5}, {"rto", 4}}; // avg 4.75
    prog->timers_per_flow = 1;
    prog->timer_event_types = {EvRto};
    prog->max_instrs_per_event = 6;

    prog->process.resize(4);
    prog->process[EvAppSend] = [pp](const Event& e, const FlowContext& in) {
        return on_app_send(pp, e, in);
    };
    prog->process[EvData] = [pp](const Event& e, const FlowContext& in) {
        return on_data(pp, e, in);
    };
    prog->process[EvAck] = [pp](const Event& e, const FlowContext& in) {
        return on_ack(pp, e, in);
    };
    prog->process[EvRto] = [pp](const Event& e, const FlowContext& in) {
        return on_rto(pp, e, in);
    };

    prog->parse = [pp](const RawInput& raw) -> std::optional<Event> {
        Event e;
        e.metadata = BitVector(pp.event_width);
        if (raw.kind == RawInput::AppRequest) {
            if (raw.bytes.size() < 12) return std::nullopt;
            e.flow_id = wire::get_u32(raw.bytes.data());
            e.event_type = EvAppSend;
            e.metadata.set_field(0, 32, wire::get_u32(raw.bytes.data() + 4));
            e.metadata.set_field(32, 32, wire::get_u32(raw.bytes.data() + 8));
            return e;
        }
        if (raw.bytes.size() < wire::kHeaderBytes) return std::nullopt;
        wire::Header h = wire::decode(raw.bytes.data(), raw.bytes.size());
        if (h.proto != wire::kProtoTcp) return std::nullopt;
        e.flow_id = h.flow;
        uint32_t payload = uint32_t(raw.bytes.size()) - wire::kHeaderBytes;
        if (payload > 0) {
            e.event_type = EvData;
            e.metadata.set_field(0, 32, h.f0);
            e.metadata.set_field(32, 16, payload);
        } else {
            e.event_type = EvAck;
            e.metadata.set_field(0, 32, h.f1);
        }
        return e;
    };

    prog->header_rules.resize(2);
    prog->header_rules[RuleIdentity] = [](BitVector&, uint64_t, const PktGenInstr&) {};
    // add the payload sent so far to the base sequence number; refresh len
    prog->header_rules[RuleSeq] = [](BitVector& h, uint64_t sent, const PktGenInstr& i) {
        wire::Header w = wire::decode_header(h);
        w.f0 = uint32_t(i.rule_arg0 + sent);
        w.len = uint16_t(std::min<uint64_t>(i.seg_size, i.total_len - sent));
        wire::encode(h, w);
    };

    uint32_t ctx_width = pp.context_width;
    uint32_t init_cwnd = pp.init_cwnd;
    prog->init_context = [ctx_width, init_cwnd]() {
        FlowContext fc(ctx_width);
        TcpCtx c;
        c.cwnd = init_cwnd;
        c.ssthresh = 0x3fffffff;
        fc.bits.store(c);
        return fc;
    };
    return prog;
}

} // namespace pita::tcp
