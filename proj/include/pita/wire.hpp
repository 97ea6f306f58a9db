#ifndef PITA_WIRE_HPP
#define PITA_WIRE_HPP

#include <cstdint>
#include <vector>

#include "pita/bits.hpp"

namespace pita::wire {

// 21-byte (168-bit) packet header shared by both protocol programs:
//   [0]     proto        (1 = tcp, 2 = roce)
//   [1:3]   flow         destination flow / queue pair
//   [3:7]   f0           seq (tcp) / psn (roce)
//   [7:11]  f1           ack (tcp) / msn, raddr (roce)
//   [11]    op           flags (tcp) / class<<3 | position (roce)
//   [12:14] len          payload bytes in this packet
//   [14:18] f2           message length / params
//   [18:21] reserved     (checksum fields carried opaque, unvalidated)
constexpr uint8_t kProtoTcp = 1;
constexpr uint8_t kProtoRoce = 2;
constexpr uint32_t kHeaderBytes = 21;

struct Header {
    uint8_t proto = 0;
    uint16_t flow = 0;
    uint32_t f0 = 0;
    uint32_t f1 = 0;
    uint8_t op = 0;
    uint16_t len = 0;
    uint32_t f2 = 0;
};

inline void put_u16(uint8_t* p, uint16_t v) { p[0] = uint8_t(v >> 8); p[1] = uint8_t(v); }
inline void put_u32(uint8_t* p, uint32_t v) {
    p[0] = uint8_t(v >> 24); p[1] = uint8_t(v >> 16); p[2] = uint8_t(v >> 8); p[3] = uint8_t(v);
}
inline uint16_t get_u16(const uint8_t* p) { return uint16_t(p[0]) << 8 | p[1]; }
inline uint32_t get_u32(const uint8_t* p) {
    return uint32_t(p[0]) << 24 | uint32_t(p[1]) << 16 | uint32_t(p[2]) << 8 | p[3];
}

inline void encode(BitVector& h, const Header& v) {
    PITA_CHECK(h.byte_size() >= kHeaderBytes, "header bit vector holds the wire header");
    uint8_t* p = h.bytes().data();
    p[0] = v.proto;
    put_u16(p + 1, v.flow);
    put_u32(p + 3, v.f0);
    put_u32(p + 7, v.f1);
    p[11] = v.op;
    put_u16(p + 12, v.len);
    put_u32(p + 14, v.f2);
}

inline Header decode(const uint8_t* p, size_t n) {
    PITA_CHECK(n >= kHeaderBytes, "packet carries a full header");
    Header v;
    v.proto = p[0];
    v.flow = get_u16(p + 1);
    v.f0 = get_u32(p + 3);
    v.f1 = get_u32(p + 7);
    v.op = p[11];
    v.len = get_u16(p + 12);
    v.f2 = get_u32(p + 14);
    return v;
}

inline Header decode_header(const BitVector& h) {
    return decode(h.bytes().data(), h.byte_size());
}

// RoCE opcode byte: class << 3 | position.
enum RoceClass : uint8_t { RcSend = 0, RcWrite = 1, RcReadReq = 2, RcReadResp = 3,
                           RcAck = 4, RcNak = 5, RcCnp = 6 };
enum RocePos : uint8_t { PosFirst = 0, PosMiddle = 1, PosLast = 2, PosOnly = 3 };

inline uint8_t roce_op(RoceClass c, RocePos p) { return uint8_t(c << 3 | p); }
inline RoceClass roce_class(uint8_t op) { return RoceClass(op >> 3); }
inline RocePos roce_pos(uint8_t op) { return RocePos(op & 7); }

inline RocePos position_of(uint64_t off, uint32_t pkt_len, uint64_t total) {
    bool first = off == 0;
    bool last = off + pkt_len >= total;
    if (first && last) return PosOnly;
    if (first) return PosFirst;
    if (last) return PosLast;
    return PosMiddle;
}

} // namespace pita::wire

#endif
