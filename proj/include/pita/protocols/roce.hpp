#ifndef PITA_PROTOCOLS_ROCE_HPP
#define PITA_PROTOCOLS_ROCE_HPP

#include <memory>

#include "pita/config.hpp"
#include "pita/program.hpp"

namespace pita::roce {

// 17 event types: 3 WQE submissions, 4 data-packet positions x {clean, ECN},
// ack, nak, cnp, and the three per-flow timers (alpha update, rate increase,
// rto). Read responses are emitted in reaction to read-request arrivals, not
// by application WQEs; the operation class travels in packet metadata.
enum : uint16_t {
    EvWqeSend = 0,
    EvWqeWrite = 1,
    EvWqeRead = 2,
    EvPktFirst = 3,
    EvPktMiddle = 4,
    EvPktLast = 5,
    EvPktOnly = 6,
    EvPktFirstEcn = 7,
    EvPktMiddleEcn = 8,
    EvPktLastEcn = 9,
    EvPktOnlyEcn = 10,
    EvAck = 11,
    EvNak = 12,
    EvCnp = 13,
    EvAlphaTimer = 14,
    EvRateTimer = 15,
    EvRto = 16,
};

constexpr uint32_t kMaxOps = 64;

struct RoceOp {
    uint8_t valid = 0;
    uint8_t cls = 0; // wire::RoceClass
    uint32_t start_psn = 0;
    uint32_t pkts = 0;
    uint32_t len = 0;
    uint32_t laddr = 0;
    uint32_t raddr = 0;
};

struct RoceCtx {
    // requester
    uint32_t sq_psn = 0;
    uint32_t una_psn = 0;
    uint8_t op_head = 0; // ops is a ring: head + count
    uint8_t op_count = 0;
    RoceOp ops[kMaxOps];
    // responder
    uint32_t expected_psn = 0;
    uint32_t msn_in = 0;
    uint8_t nak_sent = 0;
    uint8_t in_msg_cls = 0;
    uint32_t in_msg_len = 0;
    uint32_t in_msg_recv = 0;
    uint32_t in_msg_addr = 0; // app_addr reported on completion
    uint32_t rq_offset = 0;   // reassembly placement cursor
    // DCQCN (rate in 1/256 bytes/cycle, alpha in 1/65536)
    uint32_t rate_fp = 0;
    uint32_t target_fp = 0;
    uint32_t alpha_fp = 0;
    uint8_t rc_stage = 0;
    uint32_t last_cnp_cycle = 0;
    uint8_t cnp_ever = 0;
};

// app WQE encoding: [0:4) flow, [4] class (0 send, 1 write, 2 read),
// [5:9) len, [9:13) laddr, [13:17) raddr
std::vector<uint8_t> encode_wqe(uint32_t flow, uint8_t cls, uint32_t len, uint32_t laddr,
                                uint32_t raddr);

std::shared_ptr<ProtocolProgram> make_program(const SimConfig& cfg);

// Widths a RoCE world needs (context holds the op ring; events carry psn,
// class, length and params).
constexpr uint32_t kContextWidth = 16384;
constexpr uint32_t kEventWidth = 128;

} // namespace pita::roce

#endif
