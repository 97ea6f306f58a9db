#ifndef PITA_PROTOCOLS_TCP_HPP
#define PITA_PROTOCOLS_TCP_HPP

#include <memory>

#include "pita/config.hpp"
#include "pita/program.hpp"

namespace pita::tcp {

// Event types
enum : uint16_t { EvAppSend = 0, EvData = 1, EvAck = 2, EvRto = 3 };

// Sender/receiver connection state, packed into the flow context.
// ooo_valid is the received-segment bitmap over the out-of-order record
// table; records hold exact (seq, len) so arbitrary segment boundaries stay
// byte-accurate.
struct TcpCtx {
    uint32_t snd_una = 0;
    uint32_t snd_nxt = 0;
    uint32_t cwnd = 0;
    uint32_t ssthresh = 0;
    uint32_t recover = 0;
    uint32_t rcv_nxt = 0;
    uint32_t delivered = 0;
    uint32_t app_pending = 0;
    uint32_t stream_base = 0;
    uint8_t dup_acks = 0;
    uint8_t rto_active = 0;
    uint8_t in_recovery = 0;
    uint8_t ooo_valid = 0;
    uint32_t ooo_seq[8] = {};
    uint16_t ooo_len[8] = {};
};

// app request encoding: [0:4) flow, [4:8) len, [8:12) stream base address
std::vector<uint8_t> encode_app_send(uint32_t flow, uint32_t len, uint32_t stream_base);

std::shared_ptr<ProtocolProgram> make_program(const SimConfig& cfg);

} // namespace pita::tcp

#endif
