#include "pita/protocols/roce.hpp"

#include <algorithm>

#include "pita/wire.hpp"

namespace pita::roce {

namespace {

using wire::RoceClass;
using wire::RocePos;

enum : uint16_t { RuleIdentity = 0, RuleOp = 1 };

struct Params {
    uint32_t mtu, header_width, event_width, context_width;
    uint32_t g_shift, fast_recovery, rate_ai_fp, min_rate_fp, line_fp;
    uint64_t cnp_interval, alpha_timer, rate_timer, rto;
    uint32_t psn_window, max_outstanding;
};

RoceOp& op_at(RoceCtx& c, uint32_t i) { return c.ops[(c.op_head + i) % kMaxOps]; }

BitVector make_header(const Params& pp, uint32_t flow, uint8_t op, uint32_t psn, uint32_t f1,
                      uint16_t len, uint32_t f2) {
    BitVector h(pp.header_width);
    wire::Header w;
    w.proto = wire::kProtoRoce;
    w.flow = uint16_t(flow);
    w.f0 = psn;
    w.f1 = f1;
    w.op = op;
    w.len = len;
    w.f2 = f2;
    wire::encode(h, w);
    return h;
}

void push_control(const Params& pp, const Event& e, RoceClass cls, uint32_t psn, uint32_t f1,
                  std::vector<TransportInstruction>& out) {
    PktGenInstr p;
    p.header = make_header(pp, e.flow_id, wire::roce_op(cls, wire::PosOnly), psn, f1, 0, 0);
    p.header_only = true;
    p.seg_size = pp.mtu;
    p.header_rule = RuleIdentity;
    out.push_back(p);
}

void restart_timer(uint8_t id, uint64_t delay, std::vector<TransportInstruction>& out) {
    TimerInstr t;
    t.op = TimerInstr::Restart;
    t.timer_id = id;
    t.delay = delay;
    out.push_back(t);
}
void stop_timer(uint8_t id, std::vector<TransportInstruction>& out) {
    TimerInstr t;
    t.op = TimerInstr::Stop;
    t.timer_id = id;
    out.push_back(t);
}

// (Re-)emit an operation's packets from byte offset `off`. One instruction
// covers the remainder; opcodes evolve first/middle/last/only via the
// header rule.
void push_op_pktgen(const Params& pp, const Event& e, const RoceCtx& c, const RoceOp& op,
                    uint32_t off, std::vector<TransportInstruction>& out) {
    if (op.cls == wire::RcReadReq) {
        // read request: header-only, carries requested length in f2
        PktGenInstr p;
        p.header = make_header(pp, e.flow_id, wire::roce_op(wire::RcReadReq, wire::PosOnly),
                               op.start_psn, op.raddr, 0, op.len);
        p.header_only = true;
        p.seg_size = pp.mtu;
        p.header_rule = RuleIdentity;
        p.pacing = {PacingSpec::Rate, c.rate_fp, 0};
        out.push_back(p);
        return;
    }
    uint32_t remaining = op.len - off;
    uint32_t psn0 = op.start_psn + off / pp.mtu;
    uint32_t first_len = std::min(pp.mtu, remaining);
    PktGenInstr p;
    p.header = make_header(pp, e.flow_id,
                           wire::roce_op(RoceClass(op.cls), wire::position_of(off, first_len, op.len)),
                           psn0, op.raddr, uint16_t(first_len), op.len);
    p.data_addr = op.laddr + off;
    p.total_len = remaining;
    p.seg_size = pp.mtu;
    p.header_rule = RuleOp;
    p.rule_arg0 = psn0;
    p.rule_arg1 = (uint64_t(op.len) << 24) | off; // op total and base offset
    p.pacing = {PacingSpec::Rate, c.rate_fp, 0};
    out.push_back(p);
}

ProcessResult on_wqe(const Params& pp, const Event& e, const FlowContext& in) {
    ProcessResult r;
    r.ctx = in;
    RoceCtx c = in.bits.as<RoceCtx>();
    uint8_t cls = e.event_type == EvWqeSend   ? wire::RcSend
                  : e.event_type == EvWqeWrite ? wire::RcWrite
                                               : wire::RcReadReq;
    uint32_t len = uint32_t(e.metadata.get_field(0, 32));
    uint32_t laddr = uint32_t(e.metadata.get_field(32, 32));
    uint32_t raddr = uint32_t(e.metadata.get_field(64, 32));
    PITA_CHECK(c.op_count < pp.max_outstanding && c.op_count < kMaxOps,
               "WQE submitted with outstanding-operation room (app admission control)");
    uint32_t pkts = cls == wire::RcReadReq ? 1 : std::max(1u, (len + pp.mtu - 1) / pp.mtu);
    PITA_CHECK(c.sq_psn + pkts - c.una_psn <= pp.psn_window,
               "WQE submitted within the PSN window (app admission control)");
    RoceOp op;
    op.valid = 1;
    op.cls = cls;
    op.start_psn = c.sq_psn;
    op.pkts = pkts;
    op.len = len;
    op.laddr = laddr;
    op.raddr = raddr;
    op_at(c, c.op_count) = op;
    ++c.op_count;
    c.sq_psn += pkts;
    push_op_pktgen(pp, e, c, op, 0, r.instrs);
    restart_timer(2, pp.rto, r.instrs);
    r.ctx.bits.store(c);
    return r;
}

ProcessResult on_pkt(const Params& pp, const Event& e, const FlowContext& in) {
    ProcessResult r;
    r.ctx = in;
    RoceCtx c = in.bits.as<RoceCtx>();
    bool ecn = e.event_type >= EvPktFirstEcn && e.event_type <= EvPktOnlyEcn;
    RocePos pos = RocePos((e.event_type - EvPktFirst) % 4);
    uint32_t psn = uint32_t(e.metadata.get_field(0, 32));
    uint8_t cls = uint8_t(e.metadata.get_field(32, 8));
    uint32_t len = uint32_t(e.metadata.get_field(40, 16));
    uint32_t raddr = uint32_t(e.metadata.get_field(56, 32));
    uint32_t msg_len = uint32_t(e.metadata.get_field(88, 32));

    // DCQCN congestion notification, paced to one CNP per interval per flow
    if (ecn && cls != wire::RcReadReq &&
        (!c.cnp_ever || e.arrival_cycle - c.last_cnp_cycle >= pp.cnp_interval)) {
        push_control(pp, e, wire::RcCnp, 0, 0, r.instrs);
        c.last_cnp_cycle = uint32_t(e.arrival_cycle);
        c.cnp_ever = 1;
    }

    if (psn == c.expected_psn) {
        ++c.expected_psn;
        c.nak_sent = 0;
        if (cls == wire::RcReadReq) {
            // responder turns a read request into a read-response operation
            if (c.op_count < pp.max_outstanding && c.op_count < kMaxOps &&
                c.sq_psn + (msg_len + pp.mtu - 1) / pp.mtu - c.una_psn <= pp.psn_window) {
                RoceOp op;
                op.valid = 1;
                op.cls = wire::RcReadResp;
                op.start_psn = c.sq_psn;
                op.pkts = std::max(1u, (msg_len + pp.mtu - 1) / pp.mtu);
                op.len = msg_len;
                op.laddr = raddr; // responder-local source address
                op.raddr = 0;
                op_at(c, c.op_count) = op;
                ++c.op_count;
                c.sq_psn += op.pkts;
                push_op_pktgen(pp, e, c, op, 0, r.instrs);
            }
            // else: dropped; the requester's RTO re-issues the request
        } else if (e.payload_ref) {
            if (pos == wire::PosFirst || pos == wire::PosOnly) {
                c.in_msg_cls = cls;
                c.in_msg_len = msg_len;
                c.in_msg_recv = 0;
                c.in_msg_addr = cls == wire::RcWrite ? raddr : c.rq_offset;
            }
            AddDataSeg a;
            a.src_addr = *e.payload_ref;
            a.length = len;
            a.dest_offset = c.rq_offset + c.in_msg_recv;
            r.instrs.push_back(a);
            c.in_msg_recv += len;
            if (pos == wire::PosLast || pos == wire::PosOnly) {
                ++c.msn_in;
                FlushAndNotify fl;
                fl.length = c.in_msg_recv;
                fl.app_addr = c.in_msg_addr;
                r.instrs.push_back(fl);
                c.rq_offset += c.in_msg_recv;
                c.in_msg_recv = 0;
            }
        }
        if (cls != wire::RcReadReq)
            push_control(pp, e, wire::RcAck, c.expected_psn - 1, c.msn_in, r.instrs);
    } else if (psn < c.expected_psn) {
        // duplicate: re-acknowledge the current head
        push_control(pp, e, wire::RcAck, c.expected_psn - 1, c.msn_in, r.instrs);
    } else if (!c.nak_sent) {
        push_control(pp, e, wire::RcNak, c.expected_psn, 0, r.instrs);
        c.nak_sent = 1;
    }
    r.ctx.bits.store(c);
    return r;
}

void pop_acked(RoceCtx& c, uint32_t acked_through_psn) {
    while (c.op_count > 0) {
        RoceOp& op = c.ops[c.op_head];
        if (op.start_psn + op.pkts - 1 > acked_through_psn) break;
        op.valid = 0;
        c.op_head = uint8_t((c.op_head + 1) % kMaxOps);
        --c.op_count;
    }
}

ProcessResult on_ack(const Params& pp, const Event& e, const FlowContext& in) {
    ProcessResult r;
    r.ctx = in;
    RoceCtx c = in.bits.as<RoceCtx>();
    uint32_t psn = uint32_t(e.metadata.get_field(0, 32));
    pop_acked(c, psn);
    c.una_psn = std::max(c.una_psn, psn + 1);
    if (c.op_count == 0)
        stop_timer(2, r.instrs);
    else
        restart_timer(2, pp.rto, r.instrs);
    r.ctx.bits.store(c);
    return r;
}

ProcessResult on_nak(const Params& pp, const Event& e, const FlowContext& in) {
    ProcessResult r;
    r.ctx = in;
    RoceCtx c = in.bits.as<RoceCtx>();
    uint32_t psn = uint32_t(e.metadata.get_field(0, 32));
    if (psn > 0) pop_acked(c, psn - 1);
    c.una_psn = std::max(c.una_psn, psn);
    // go-back-N: resume the operation containing the NAK'd PSN
    for (uint32_t i = 0; i < c.op_count; ++i) {
        RoceOp& op = op_at(c, i);
        if (psn >= op.start_psn && psn < op.start_psn + op.pkts) {
            push_op_pktgen(pp, e, c, op, (psn - op.start_psn) * pp.mtu, r.instrs);
            break;
        }
    }
    restart_timer(2, pp.rto, r.instrs);
    r.ctx.bits.store(c);
    return r;
}

ProcessResult on_cnp(const Params& pp, const Event&, const FlowContext& in) {
    ProcessResult r;
    r.ctx = in;
    RoceCtx c = in.bits.as<RoceCtx>();
    c.target_fp = c.rate_fp;
    uint64_t cut = (uint64_t(c.rate_fp) * c.alpha_fp / 2) >> 16; // rate * alpha/2
    c.rate_fp = uint32_t(std::max<uint64_t>(pp.min_rate_fp, c.rate_fp - cut));
    c.alpha_fp = c.alpha_fp + ((65536 - c.alpha_fp) >> pp.g_shift); // (1-g)a + g
    c.rc_stage = 0;
    restart_timer(0, pp.alpha_timer, r.instrs);
    restart_timer(1, pp.rate_timer, r.instrs);
    r.ctx.bits.store(c);
    return r;
}

ProcessResult on_alpha_timer(const Params& pp, const Event&, const FlowContext& in) {
    ProcessResult r;
    r.ctx = in;
    RoceCtx c = in.bits.as<RoceCtx>();
    c.alpha_fp -= c.alpha_fp >> pp.g_shift; // alpha *= (1-g)
    if (c.alpha_fp > 16) restart_timer(0, pp.alpha_timer, r.instrs);
    r.ctx.bits.store(c);
    return r;
}

ProcessResult on_rate_timer(const Params& pp, const Event&, const FlowContext& in) {
    ProcessResult r;
    r.ctx = in;
    RoceCtx c = in.bits.as<RoceCtx>();
    if (c.rc_stage < pp.fast_recovery) {
        ++c.rc_stage; // fast recovery toward the rate before the last cut
    } else {
        c.target_fp = std::min(pp.line_fp, c.target_fp + pp.rate_ai_fp); // additive
    }
    c.rate_fp = uint32_t((uint64_t(c.rate_fp) + c.target_fp) / 2);
    if (c.rate_fp + 1 < pp.line_fp) restart_timer(1, pp.rate_timer, r.instrs);
    r.ctx.bits.store(c);
    return r;
}

ProcessResult on_rto(const Params& pp, const Event& e, const FlowContext& in) {
    ProcessResult r;
    r.ctx = in;
    RoceCtx c = in.bits.as<RoceCtx>();
    if (c.op_count > 0) {
        RoceOp& op = c.ops[c.op_head];
        uint32_t off = c.una_psn > op.start_psn ? (c.una_psn - op.start_psn) * pp.mtu : 0;
        push_op_pktgen(pp, e, c, op, off, r.instrs);
        restart_timer(2, pp.rto, r.instrs);
    }
    r.ctx.bits.store(c);
    return r;
}

} // namespace

std::vector<uint8_t> encode_wqe(uint32_t flow, uint8_t cls, uint32_t len, uint32_t laddr,
                                uint32_t raddr) {
    std::vector<uint8_t> b(17);
    wire::put_u32(b.data(), flow);
    b[4] = cls;
    wire::put_u32(b.data() + 5, len);
    wire::put_u32(b.data() + 9, laddr);
    wire::put_u32(b.data() + 13, raddr);
    return b;
}

std::shared_ptr<ProtocolProgram> make_program(const SimConfig& cfg) {
    auto prog = std::make_shared<ProtocolProgram>();
    Params pp{cfg.roce_mtu,
              cfg.header_width,
              cfg.event_width,
              cfg.context_width,
              cfg.roce_g_shift,
              cfg.roce_fast_recovery,
              cfg.roce_rate_ai_fp,
              cfg.roce_min_rate_fp,
              uint32_t(cfg.line_rate_bytes_per_cycle() * 256),
              cfg.roce_cnp_interval,
              cfg.roce_alpha_timer,
              cfg.roce_rate_timer,
              cfg.roce_rto_cycles,
              cfg.roce_psn_window,
              cfg.roce_max_outstanding};
    PITA_CHECK(sizeof(RoceCtx) <= cfg.context_width / 8,
               "roce context fits the configured context width");
    PITA_CHECK(cfg.event_width >= 120, "roce events need a 128-bit metadata width");

    prog->name = "rocev2_dcqcn";
    prog->event_types = {
        {"wqe_send", 3},      {"wqe_write", 3},      {"wqe_read", 2},
        {"pkt_first", 2},     {"pkt_middle", 2},     {"pkt_last", 3},     {"pkt_only", 3},
        {"pkt_first_ecn", 2}, {"pkt_middle_ecn", 2}, {"pkt_last_ecn", 3}, {"pkt_only_ecn", 3},
        {"ack", 2},           {"nak", 2},            {"cnp", 2},
        {"alpha_timer", 2},   {"rate_timer", 2},     {"rto", 2}}; // avg 40/17 = 2.35
    prog->timers_per_flow = 3;
    prog->timer_event_types = {EvAlphaTimer, EvRateTimer, EvRto};
    prog->max_instrs_per_event = 6;

    prog->process.resize(17);
    auto bind = [&](uint16_t t, ProcessResult (*fn)(const Params&, const Event&, const FlowContext&)) {
        prog->process[t] = [pp, fn](const Event& e, const FlowContext& in) { return fn(pp, e, in); };
    };
    bind(EvWqeSend, on_wqe);
    bind(EvWqeWrite, on_wqe);
    bind(EvWqeRead, on_wqe);
    for (uint16_t t = EvPktFirst; t <= EvPktOnlyEcn; ++t) bind(t, on_pkt);
    bind(EvAck, on_ack);
    bind(EvNak, on_nak);
    bind(EvCnp, on_cnp);
    bind(EvAlphaTimer, on_alpha_timer);
    bind(EvRateTimer, on_rate_timer);
    bind(EvRto, on_rto);

    prog->parse = [pp](const RawInput& raw) -> std::optional<Event> {
        Event e;
        e.metadata = BitVector(pp.event_width);
        if (raw.kind == RawInput::AppRequest) {
            if (raw.bytes.size() < 17) return std::nullopt;
            uint8_t cls = raw.bytes[4];
            if (cls > 2) return std::nullopt;
            e.flow_id = wire::get_u32(raw.bytes.data());
            e.event_type = uint16_t(EvWqeSend + cls);
            e.metadata.set_field(0, 32, wire::get_u32(raw.bytes.data() + 5));
            e.metadata.set_field(32, 32, wire::get_u32(raw.bytes.data() + 9));
            e.metadata.set_field(64, 32, wire::get_u32(raw.bytes.data() + 13));
            return e;
        }
        if (raw.bytes.size() < wire::kHeaderBytes) return std::nullopt;
        wire::Header h = wire::decode(raw.bytes.data(), raw.bytes.size());
        if (h.proto != wire::kProtoRoce) return std::nullopt;
        e.flow_id = h.flow;
        RoceClass cls = wire::roce_class(h.op);
        switch (cls) {
            case wire::RcAck:
                e.event_type = EvAck;
                e.metadata.set_field(0, 32, h.f0);
                e.metadata.set_field(32, 32, h.f1);
                return e;
            case wire::RcNak:
                e.event_type = EvNak;
                e.metadata.set_field(0, 32, h.f0);
                return e;
            case wire::RcCnp:
                e.event_type = EvCnp;
                return e;
            default: {
                uint32_t payload = uint32_t(raw.bytes.size()) - wire::kHeaderBytes;
                e.event_type = uint16_t(EvPktFirst + wire::roce_pos(h.op) + (raw.ecn ? 4 : 0));
                e.metadata.set_field(0, 32, h.f0);
                e.metadata.set_field(32, 8, cls);
                e.metadata.set_field(40, 16, payload);
                e.metadata.set_field(56, 32, h.f1);
                e.metadata.set_field(88, 32, h.f2);
                return e;
            }
        }
    };

    prog->header_rules.resize(2);
    prog->header_rules[RuleIdentity] = [](BitVector&, uint64_t, const PktGenInstr&) {};
    // psn advances per packet; opcode depends on whether the packet is the
    // first, middle, or last of the operation
    prog->header_rules[RuleOp] = [mtu = pp.mtu](BitVector& h, uint64_t sent, const PktGenInstr& i) {
        wire::Header w = wire::decode_header(h);
        uint64_t op_total = i.rule_arg1 >> 24;
        uint64_t base_off = i.rule_arg1 & 0xffffff;
        uint64_t abs_off = base_off + sent;
        uint32_t pkt_len = uint32_t(std::min<uint64_t>(mtu, i.total_len - sent));
        w.f0 = uint32_t(i.rule_arg0 + sent / mtu);
        w.op = wire::roce_op(wire::roce_class(w.op), wire::position_of(abs_off, pkt_len, op_total));
        w.len = uint16_t(pkt_len);
        wire::encode(h, w);
    };

    uint32_t ctx_width = cfg.context_width;
    uint32_t line_fp = pp.line_fp;
    prog->init_context = [ctx_width, line_fp]() {
        FlowContext fc(ctx_width);
        RoceCtx c;
        c.rate_fp = line_fp;
        c.target_fp = line_fp;
        c.alpha_fp = 65536;
        fc.bits.store(c);
        return fc;
    };
    return prog;
}

} // namespace pita::roce
